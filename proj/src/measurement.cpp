#include "difftomo/measurement.hpp"

#include <cmath>

#include "difftomo/fft.hpp"
#include "difftomo/rng.hpp"

namespace difftomo {

PhaseMask random_phase_mask(const LatticeSpec& spec, std::uint64_t seed) {
    PhaseMask mask(spec);
    Rng rng(seed);
    for (double& phi : mask.phases) phi = rng.uniform(0.0, 2.0 * pi);
    return mask;
}

std::vector<cplx> oversample_embed(const std::vector<cplx>& image, const LatticeSpec& spec) {
    const int p = spec.p, q = 2 * p - 1;
    std::vector<cplx> big(static_cast<std::size_t>(q) * q, cplx(0.0));
    for (int a = range_lo(p); a <= range_hi(p); ++a)
        for (int b = range_lo(p); b <= range_hi(p); ++b)
            big[static_cast<std::size_t>(wrap(a, q)) * q + wrap(b, q)] =
                image[static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)];
    return big;
}

DiffractionPattern diffraction_pattern(const std::vector<cplx>& image, const PhaseMask* mask,
                                       bool oversampled, const LatticeSpec& spec) {
    const int p = spec.p;
    if (image.size() != static_cast<std::size_t>(p) * p)
        throw std::invalid_argument("diffraction_pattern: image must be p x p");
    std::vector<cplx> masked(image);
    if (mask) {
        if (mask->spec.p != p)
            throw std::invalid_argument("diffraction_pattern: mask size mismatch");
        for (std::size_t i = 0; i < masked.size(); ++i) masked[i] *= mask->value(i);
    }
    DiffractionPattern out(spec, oversampled);
    std::vector<cplx> work = oversampled ? oversample_embed(masked, spec) : std::move(masked);
    fft2(work.data(), out.side());
    for (std::size_t i = 0; i < work.size(); ++i) out.intensities[i] = std::norm(work[i]);
    return out;
}

std::vector<cplx> ambiguity_variant(const std::vector<cplx>& image, int side,
                                    AmbiguityKind kind, std::array<int, 2> m, double theta) {
    if (image.size() != static_cast<std::size_t>(side) * side)
        throw std::invalid_argument("ambiguity_variant: size mismatch");
    std::vector<cplx> out(image.size());
    auto at = [&](int a, int b) -> const cplx& {
        return image[static_cast<std::size_t>(wrap(a, side)) * side + wrap(b, side)];
    };
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b) {
            cplx v;
            switch (kind) {
                case AmbiguityKind::Translate: v = at(a + m[0], b + m[1]); break;
                case AmbiguityKind::ConjugateFlip: v = std::conj(at(-a + m[0], -b + m[1])); break;
                default: v = unit_phase(theta) * at(a, b); break;
            }
            out[static_cast<std::size_t>(a) * side + b] = v;
        }
    return out;
}

DiffractionPattern poissonize(const DiffractionPattern& pattern, const NoiseSpec& noise) {
    DiffractionPattern out(pattern.spec, pattern.oversampled);
    Rng rng(noise.seed);
    for (std::size_t i = 0; i < pattern.intensities.size(); ++i)
        out.intensities[i] =
            static_cast<double>(rng.poisson(noise.s * pattern.intensities[i]));
    return out;
}

double nsr(const DiffractionPattern& pattern, double s) {
    double b1 = 0.0, b2 = 0.0;
    for (double v : pattern.intensities) {
        b1 += std::sqrt(v);
        b2 += v;
    }
    return b1 / (std::sqrt(s) * b2);
}

double nsr(const DiffractionPattern& pattern, const NoiseSpec& noise) {
    return nsr(pattern, noise.s);
}

double solve_s_for_nsr(const DiffractionPattern& pattern, double target_nsr) {
    if (!(target_nsr > 0.0))
        throw std::invalid_argument("solve_s_for_nsr: target must be positive");
    double b1 = 0.0, b2 = 0.0;
    for (double v : pattern.intensities) {
        b1 += std::sqrt(v);
        b2 += v;
    }
    if (b2 == 0.0) throw std::invalid_argument("solve_s_for_nsr: zero pattern");
    const double root = b1 / (target_nsr * b2);
    return root * root;
}

}  // namespace difftomo
