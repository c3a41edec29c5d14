#include "difftomo/projector.hpp"

#include <cmath>

#include "difftomo/fft.hpp"

namespace difftomo {

namespace {

void require_interior(const Direction& dir) {
    if (std::abs(dir.alpha) >= 1.0 || std::abs(dir.beta) >= 1.0)
        throw std::invalid_argument("project: slopes must satisfy |alpha|, |beta| < 1");
}

}  // namespace

// Embed object slice s (coordinate along the family axis) into a p^2 image.
void slice_embed(const cplx* obj, const LatticeSpec& spec, Family family, int s,
                 cplx* img) {
    const int n = spec.n, p = spec.p;
    std::fill(img, img + static_cast<std::size_t>(p) * p, cplx(0.0));
    const int lo = range_lo(n), hi = range_hi(n);
    for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b) {
            int i, j, k;
            switch (family) {
                case Family::X: i = s; j = a; k = b; break;
                case Family::Y: i = a; j = s; k = b; break;
                default: i = a; j = b; k = s; break;
            }
            std::size_t oidx =
                (static_cast<std::size_t>(wrap(i, n)) * n + wrap(j, n)) * n + wrap(k, n);
            img[static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)] = obj[oidx];
        }
}

// Adjoint of slice_embed: crop the p^2 image into object slice s, adding.
void slice_crop_add(const cplx* img, const LatticeSpec& spec, Family family, int s,
                    cplx* obj) {
    const int n = spec.n, p = spec.p;
    const int lo = range_lo(n), hi = range_hi(n);
    for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b) {
            int i, j, k;
            switch (family) {
                case Family::X: i = s; j = a; k = b; break;
                case Family::Y: i = a; j = s; k = b; break;
                default: i = a; j = b; k = s; break;
            }
            std::size_t oidx =
                (static_cast<std::size_t>(wrap(i, n)) * n + wrap(j, n)) * n + wrap(k, n);
            obj[oidx] += img[static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)];
        }
}

void project_raw(const cplx* obj, const LatticeSpec& spec, const Direction& dir, cplx* img) {
    require_interior(dir);
    const int n = spec.n, p = spec.p;
    const std::size_t area = static_cast<std::size_t>(p) * p;
    std::vector<cplx> buf(area), acc(area, cplx(0.0));
    std::vector<cplx> rowfac(p), colfac(p);
    for (int s = range_lo(n); s <= range_hi(n); ++s) {
        slice_embed(obj, spec, dir.family, s, buf.data());
        fft2(buf.data(), p);
        // Fractional shift of slice s by (alpha s, beta s): linear phase in
        // centered frequencies, exact for the band-limited model.
        for (int w = 0; w < p; ++w) {
            const double freq = centered(w, p);
            rowfac[w] = unit_phase(2.0 * pi * freq * dir.alpha * s / p);
            colfac[w] = unit_phase(2.0 * pi * freq * dir.beta * s / p);
        }
        for (int u = 0; u < p; ++u)
            for (int v = 0; v < p; ++v)
                acc[static_cast<std::size_t>(u) * p + v] +=
                    buf[static_cast<std::size_t>(u) * p + v] * rowfac[u] * colfac[v];
    }
    ifft2(acc.data(), p);
    std::copy(acc.begin(), acc.end(), img);
}

void project_adjoint_raw(const cplx* img, const LatticeSpec& spec, const Direction& dir,
                         cplx* obj) {
    require_interior(dir);
    const int n = spec.n, p = spec.p;
    const std::size_t area = static_cast<std::size_t>(p) * p;
    std::vector<cplx> spec2(img, img + area), buf(area);
    fft2(spec2.data(), p);
    std::vector<cplx> rowfac(p), colfac(p);
    for (int s = range_lo(n); s <= range_hi(n); ++s) {
        for (int w = 0; w < p; ++w) {
            const double freq = centered(w, p);
            rowfac[w] = unit_phase(-2.0 * pi * freq * dir.alpha * s / p);
            colfac[w] = unit_phase(-2.0 * pi * freq * dir.beta * s / p);
        }
        for (int u = 0; u < p; ++u)
            for (int v = 0; v < p; ++v)
                buf[static_cast<std::size_t>(u) * p + v] =
                    spec2[static_cast<std::size_t>(u) * p + v] * rowfac[u] * colfac[v];
        ifft2(buf.data(), p);
        slice_crop_add(buf.data(), spec, dir.family, s, obj);
    }
}

Projection2D project(const Object3D& obj, const Direction& dir) {
    Projection2D out(obj.spec, dir);
    project_raw(obj.values.data(), obj.spec, dir, out.values.data());
    return out;
}

Projection2D phase_projection(const Object3D& obj, const Direction& dir) {
    Projection2D out = project(obj, dir);
    const cplx ik(0.0, obj.spec.kappa);
    for (cplx& v : out.values) v = std::exp(ik * v);
    return out;
}

Projection2D hybrid_projection(const Object3D& obj, const Direction& dir, double q) {
    if (q < 1.0) throw std::invalid_argument("hybrid_projection: q must be >= 1");
    Projection2D out = project(obj, dir);
    const cplx ik(0.0, obj.spec.kappa);
    for (cplx& v : out.values) v = std::pow(cplx(1.0) + ik * v / q, q);
    return out;
}

std::pair<int, int> support_bounds(const Direction& dir, const LatticeSpec& spec) {
    auto extent = [&](double slope) {
        return 2 * static_cast<int>(std::floor((1.0 + std::abs(slope)) * (spec.n - 1) / 2.0)) +
               1;
    };
    return {extent(dir.alpha), extent(dir.beta)};
}

}  // namespace difftomo
