#include "difftomo/spectral.hpp"

#include <cmath>

#include "difftomo/fft.hpp"

namespace difftomo {

namespace {

// Axis along which the direction's slice plane has its free (non-integer)
// coordinate, and the two axes carrying the integer pair, in axis order.
int family_axis(Family f) { return static_cast<int>(f); }

std::array<int, 2> cross_axes(Family f) {
    switch (f) {
        case Family::X: return {1, 2};
        case Family::Y: return {0, 2};
        default: return {0, 1};
    }
}

bool nearly_parallel(const Direction& a, const Direction& b) {
    auto u = a.unit_vector(), v = b.unit_vector();
    double cx = u[1] * v[2] - u[2] * v[1];
    double cy = u[2] * v[0] - u[0] * v[2];
    double cz = u[0] * v[1] - u[1] * v[0];
    return std::sqrt(cx * cx + cy * cy + cz * cz) < 1e-12;
}

}  // namespace

Spectrum3D dft3(const Object3D& obj) {
    const int n = obj.spec.n, p = obj.spec.p;
    Spectrum3D out(obj.spec);
    for (int i = range_lo(n); i <= range_hi(n); ++i)
        for (int j = range_lo(n); j <= range_hi(n); ++j)
            for (int k = range_lo(n); k <= range_hi(n); ++k)
                out.values[out.index(i, j, k)] = obj.at(i, j, k);
    fft3(out.values.data(), p);
    return out;
}

std::vector<cplx> dft2(const std::vector<cplx>& img, int p) {
    std::vector<cplx> out(img);
    fft2(out.data(), p);
    return out;
}

std::vector<cplx> dft2(const Projection2D& proj) { return dft2(proj.values, proj.spec.p); }

cplx fourier_slice(const Spectrum3D& spec3, const Direction& dir,
                   const std::array<int, 2>& k) {
    const int n = spec3.spec.n, p = spec3.spec.p;
    const double off = -dir.alpha * k[0] - dir.beta * k[1];

    // Recover the Z_n Laurent coefficients along the family axis, then
    // evaluate at the non-integer coordinate.
    cplx result = 0.0;
    for (int m = range_lo(n); m <= range_hi(n); ++m) {
        cplx coeff = 0.0;
        for (int w = 0; w < p; ++w) {
            const int freq = centered(w, p);
            int xi, eta, zeta;
            switch (dir.family) {
                case Family::X: xi = freq; eta = k[0]; zeta = k[1]; break;
                case Family::Y: xi = k[0]; eta = freq; zeta = k[1]; break;
                default: xi = k[0]; eta = k[1]; zeta = freq; break;
            }
            coeff += spec3.at(xi, eta, zeta) * unit_phase(2.0 * pi * freq * m / p);
        }
        coeff /= static_cast<double>(p);
        result += coeff * unit_phase(-2.0 * pi * off * m / p);
    }
    return result;
}

double verify_slice_theorem(const Object3D& obj, const Direction& dir) {
    const int p = obj.spec.p;
    Spectrum3D spec3 = dft3(obj);
    std::vector<cplx> proj_hat = dft2(project(obj, dir));
    double worst = 0.0;
    for (int k1 = range_lo(p); k1 <= range_hi(p); ++k1)
        for (int k2 = range_lo(p); k2 <= range_hi(p); ++k2) {
            cplx lhs = proj_hat[static_cast<std::size_t>(wrap(k1, p)) * p + wrap(k2, p)];
            cplx rhs = fourier_slice(spec3, dir, {k1, k2});
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    return worst;
}

std::vector<CommonLinePair> common_line_points(const Direction& t, const Direction& t_prime,
                                               const LatticeSpec& spec) {
    if (nearly_parallel(t, t_prime))
        throw std::invalid_argument("common_line_points: directions are parallel");
    const int p = spec.p;
    const double tol = 1e-12 * p;
    const int axis = family_axis(t.family);
    const int axis_p = family_axis(t_prime.family);
    const auto free_axes_p = cross_axes(t_prime.family);

    std::vector<CommonLinePair> out;
    for (int k1 = range_lo(p); k1 <= range_hi(p); ++k1)
        for (int k2 = range_lo(p); k2 <= range_hi(p); ++k2) {
            // 3D frequency of the point k on t's slice plane.
            std::array<double, 3> w{};
            const auto axes = cross_axes(t.family);
            w[axes[0]] = k1;
            w[axes[1]] = k2;
            w[axis] = -t.alpha * k1 - t.beta * k2;

            // The same 3D point must sit on t''s plane at integer coordinates.
            double a = w[free_axes_p[0]], b = w[free_axes_p[1]];
            double ra = std::round(a), rb = std::round(b);
            if (std::abs(a - ra) > tol || std::abs(b - rb) > tol) continue;
            double dep = -t_prime.alpha * ra - t_prime.beta * rb;
            if (std::abs(w[axis_p] - dep) > tol) continue;
            out.push_back({{k1, k2},
                           {centered(wrap(std::llround(ra), p), p),
                            centered(wrap(std::llround(rb), p), p)}});
        }
    return out;
}

}  // namespace difftomo
