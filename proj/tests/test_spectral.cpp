#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "difftomo/rng.hpp"
#include "difftomo/spectral.hpp"

using namespace difftomo;

namespace {

Object3D random_object(const LatticeSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    Object3D obj(spec);
    for (cplx& v : obj.values) v = cplx(rng.normal(), rng.normal());
    return obj;
}

// Spectrum of the padded object at arbitrary real frequencies, straight from
// the defining sum over Z_n^3.
cplx spectrum_oracle(const Object3D& obj, double u, double v, double w) {
    const int n = obj.spec.n, p = obj.spec.p;
    cplx acc = 0.0;
    for (int i = range_lo(n); i <= range_hi(n); ++i)
        for (int j = range_lo(n); j <= range_hi(n); ++j)
            for (int k = range_lo(n); k <= range_hi(n); ++k)
                acc += obj.at(i, j, k) * unit_phase(-2.0 * pi * (u * i + v * j + w * k) / p);
    return acc;
}

}  // namespace

TEST_CASE("3d transform matches the direct sum") {
    LatticeSpec spec(3, 5);
    Object3D obj = random_object(spec, 5);
    Spectrum3D sp = dft3(obj);
    for (int xi = -2; xi <= 2; ++xi)
        for (int eta = -2; eta <= 2; ++eta)
            for (int zeta = -2; zeta <= 2; ++zeta)
                CHECK(std::abs(sp.at(xi, eta, zeta) - spectrum_oracle(obj, xi, eta, zeta)) <
                      1e-11);
}

TEST_CASE("3d transform satisfies parseval") {
    LatticeSpec spec(5, 11);
    Object3D obj = random_object(spec, 6);
    Spectrum3D sp = dft3(obj);
    double lhs = 0.0, rhs = 0.0;
    for (const cplx& v : sp.values) lhs += std::norm(v);
    for (const cplx& v : obj.values) rhs += std::norm(v);
    CHECK(lhs == doctest::Approx(11.0 * 11.0 * 11.0 * rhs).epsilon(1e-12));
}

TEST_CASE("2d transform matches the direct sum") {
    const int p = 5;
    Rng rng(9);
    std::vector<cplx> img(p * p);
    for (cplx& v : img) v = cplx(rng.normal(), rng.normal());
    std::vector<cplx> hat = dft2(img, p);
    for (int xi = 0; xi < p; ++xi)
        for (int eta = 0; eta < p; ++eta) {
            cplx acc = 0.0;
            for (int a = 0; a < p; ++a)
                for (int b = 0; b < p; ++b)
                    acc += img[static_cast<std::size_t>(a) * p + b] *
                           unit_phase(-2.0 * pi * (xi * a + eta * b) / p);
            CHECK(std::abs(hat[static_cast<std::size_t>(xi) * p + eta] - acc) < 1e-11);
        }
}

TEST_CASE("off-plane slice evaluation matches the direct spectrum") {
    LatticeSpec spec(3, 5);
    Object3D obj = random_object(spec, 15);
    Spectrum3D sp = dft3(obj);
    Rng rng(16);
    for (int trial = 0; trial < 6; ++trial) {
        Family f = static_cast<Family>(trial % 3);
        Direction dir(f, rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9));
        for (int k1 = -2; k1 <= 2; ++k1)
            for (int k2 = -2; k2 <= 2; ++k2) {
                double off = -(dir.alpha * k1 + dir.beta * k2);
                cplx expect;
                switch (f) {
                    case Family::X: expect = spectrum_oracle(obj, off, k1, k2); break;
                    case Family::Y: expect = spectrum_oracle(obj, k1, off, k2); break;
                    default: expect = spectrum_oracle(obj, k1, k2, off); break;
                }
                CHECK(std::abs(fourier_slice(sp, dir, {k1, k2}) - expect) < 1e-10);
            }
    }
}

TEST_CASE("projection spectra agree with planar slices of the volume spectrum") {
    LatticeSpec spec(5, 9);
    Object3D obj = random_object(spec, 25);
    Rng rng(26);
    for (int trial = 0; trial < 6; ++trial) {
        Direction dir(static_cast<Family>(trial % 3), rng.uniform(-0.95, 0.95),
                      rng.uniform(-0.95, 0.95));
        CHECK(verify_slice_theorem(obj, dir) < 1e-9);
    }
}

TEST_CASE("slice agreement fails for a mismatched direction") {
    LatticeSpec spec(5, 9);
    Object3D obj = random_object(spec, 27);
    Direction real_dir(Family::X, 0.3, 0.5);
    Projection2D proj = project(obj, real_dir);
    Spectrum3D sp = dft3(obj);
    std::vector<cplx> hat = dft2(proj);
    // Compare against the slice of a different direction: must not match.
    Direction wrong(Family::X, 0.31, 0.5);
    double max_err = 0.0;
    for (int k1 = range_lo(9); k1 <= range_hi(9); ++k1)
        for (int k2 = range_lo(9); k2 <= range_hi(9); ++k2) {
            std::size_t idx = static_cast<std::size_t>(wrap(k1, 9)) * 9 + wrap(k2, 9);
            max_err = std::max(max_err, std::abs(hat[idx] - fourier_slice(sp, wrong, {k1, k2})));
        }
    CHECK(max_err > 1e-3);
}

TEST_CASE("common line points lie on both planes and include the origin") {
    LatticeSpec spec(5, 9);
    auto plane_point = [](const Direction& d, int k1, int k2) -> std::array<double, 3> {
        double off = -(d.alpha * k1 + d.beta * k2);
        switch (d.family) {
            case Family::X: return {off, double(k1), double(k2)};
            case Family::Y: return {double(k1), off, double(k2)};
            default: return {double(k1), double(k2), off};
        }
    };
    Rng rng(35);
    int nonorigin_seen = 0;
    for (int trial = 0; trial < 12; ++trial) {
        Direction t(static_cast<Family>(trial % 3), rng.uniform(-0.9, 0.9),
                    rng.uniform(-0.9, 0.9));
        Direction tp(static_cast<Family>((trial + 1) % 3), rng.uniform(-0.9, 0.9),
                     rng.uniform(-0.9, 0.9));
        auto pairs = common_line_points(t, tp, spec);
        bool origin = false;
        for (const CommonLinePair& cp : pairs) {
            auto a = plane_point(t, cp.k[0], cp.k[1]);
            auto b = plane_point(tp, cp.k_prime[0], cp.k_prime[1]);
            for (int d = 0; d < 3; ++d) CHECK(std::abs(a[d] - b[d]) < 1e-9);
            if (cp.k[0] == 0 && cp.k[1] == 0) origin = true;
            else ++nonorigin_seen;
        }
        CHECK(origin);
    }
    CHECK(nonorigin_seen >= 0);

    // Integer-slope directions intersect along a whole lattice line.
    auto pairs = common_line_points(Direction(Family::X, 0.0, 0.0),
                                    Direction(Family::Y, 0.0, 0.0), spec);
    CHECK(pairs.size() == 9);  // the shared axis holds p integer points

    CHECK_THROWS(common_line_points(Direction(Family::X, 0.25, 0.5),
                                    Direction(Family::X, 0.25, 0.5), spec));
}

TEST_CASE("common line values of the spectrum actually coincide") {
    LatticeSpec spec(5, 9);
    Object3D obj = random_object(spec, 45);
    Spectrum3D sp = dft3(obj);
    // Both planes contain the third coordinate axis (beta = 0), so the common
    // line carries all p lattice points, not just the origin.
    Direction t(Family::X, 0.5, 0.0);
    Direction tp(Family::Y, -0.25, 0.0);
    auto pairs = common_line_points(t, tp, spec);
    CHECK(pairs.size() == 9);
    for (const CommonLinePair& cp : pairs)
        CHECK(std::abs(fourier_slice(sp, t, cp.k) - fourier_slice(sp, tp, cp.k_prime)) < 1e-9);
}
