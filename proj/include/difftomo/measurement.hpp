#pragma once

#include <cstdint>
#include <variant>

#include "difftomo/projector.hpp"

namespace difftomo {

// Unit-modulus random mask on Z_p^2 (wrapped storage like Projection2D).
struct PhaseMask {
    LatticeSpec spec;
    std::vector<double> phases;

    PhaseMask() = default;
    explicit PhaseMask(const LatticeSpec& s)
        : spec(s), phases(static_cast<std::size_t>(s.p) * s.p, 0.0) {}

    cplx value(std::size_t idx) const { return unit_phase(phases[idx]); }
    cplx value(int c1, int c2) const {
        return unit_phase(phases[static_cast<std::size_t>(wrap(c1, spec.p)) * spec.p +
                                 wrap(c2, spec.p)]);
    }
};

// Nonnegative intensity grid: p x p, or (2p-1) x (2p-1) when oversampled.
struct DiffractionPattern {
    LatticeSpec spec;
    bool oversampled = false;
    std::vector<double> intensities;

    DiffractionPattern() = default;
    DiffractionPattern(const LatticeSpec& s, bool over)
        : spec(s), oversampled(over),
          intensities(static_cast<std::size_t>(side()) * side(), 0.0) {}

    int side() const { return oversampled ? 2 * spec.p - 1 : spec.p; }
};

struct NoiseSpec {
    double s = 1.0;  // interaction scale; counts have mean s * intensity
    std::uint64_t seed = 0;

    NoiseSpec() = default;
    NoiseSpec(double s_, std::uint64_t seed_) : s(s_), seed(seed_) {
        if (!(s > 0.0)) throw std::invalid_argument("noise: s must be positive");
    }
};

PhaseMask random_phase_mask(const LatticeSpec& spec, std::uint64_t seed);

// |DFT(mask . image)|^2; with oversampling the masked image is zero-padded to
// 2p-1 per axis so the pattern carries the full autocorrelation.
DiffractionPattern diffraction_pattern(const std::vector<cplx>& image, const PhaseMask* mask,
                                       bool oversampled, const LatticeSpec& spec);

enum class AmbiguityKind { Translate, ConjugateFlip, GlobalPhase };

// Cyclic trivial-ambiguity generators on a square complex array:
// translate x(n) -> x(n+m); conjugate_flip x(n) -> conj(x(-n+m));
// global_phase x(n) -> e^{i theta} x(n).
std::vector<cplx> ambiguity_variant(const std::vector<cplx>& image, int side,
                                    AmbiguityKind kind, std::array<int, 2> m = {0, 0},
                                    double theta = 0.0);

// Embed a p^2 image into the (2p-1)^2 oversampling grid (wrapped storage).
std::vector<cplx> oversample_embed(const std::vector<cplx>& image, const LatticeSpec& spec);

// Independent Poisson draws with mean s * intensity; output holds counts.
DiffractionPattern poissonize(const DiffractionPattern& pattern, const NoiseSpec& noise);

// Noise-to-signal ratio |b|_1 / (sqrt(s) |b^2|_1), b = sqrt(intensities).
double nsr(const DiffractionPattern& pattern, const NoiseSpec& noise);
double nsr(const DiffractionPattern& pattern, double s);

// Scale s achieving the requested NSR on this pattern.
double solve_s_for_nsr(const DiffractionPattern& pattern, double target_nsr);

}  // namespace difftomo
