#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "difftomo/projector.hpp"
#include "difftomo/rng.hpp"

using namespace difftomo;

namespace {

Object3D random_object(const LatticeSpec& spec, std::uint64_t seed, bool real = false) {
    Rng rng(seed);
    Object3D obj(spec);
    for (cplx& v : obj.values) v = real ? cplx(rng.normal(), 0.0) : cplx(rng.normal(), rng.normal());
    return obj;
}

// Line-sum oracle straight from the definition: per slice along the family
// axis, sample the band-limited interpolant at the sheared grid point.
Projection2D project_oracle(const Object3D& obj, const Direction& dir) {
    const int n = obj.spec.n, p = obj.spec.p;
    Projection2D out(obj.spec, dir);
    for (int c1 = range_lo(p); c1 <= range_hi(p); ++c1)
        for (int c2 = range_lo(p); c2 <= range_hi(p); ++c2) {
            cplx acc = 0.0;
            for (int s = range_lo(n); s <= range_hi(n); ++s) {
                double u = dir.alpha * s + c1, v = dir.beta * s + c2;
                cplx slice = 0.0;
                for (int a = range_lo(n); a <= range_hi(n); ++a)
                    for (int b = range_lo(n); b <= range_hi(n); ++b) {
                        cplx f;
                        switch (dir.family) {
                            case Family::X: f = obj.at(s, a, b); break;
                            case Family::Y: f = obj.at(a, s, b); break;
                            default: f = obj.at(a, b, s); break;
                        }
                        slice += f * dirichlet_kernel(u - a, obj.spec) *
                                 dirichlet_kernel(v - b, obj.spec);
                    }
                acc += slice;
            }
            out.at(c1, c2) = acc;
        }
    return out;
}

double max_diff(const Projection2D& a, const Projection2D& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("direction validation and vectors") {
    CHECK_THROWS_AS(Direction(Family::X, 1.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Direction(Family::Z, 0.0, -1.01), std::invalid_argument);
    CHECK_NOTHROW(Direction(Family::Y, 1.0, -1.0));
    Direction d(Family::Y, 0.3, -0.4);
    auto r = d.rep_vector();
    CHECK(r[0] == 0.3);
    CHECK(r[1] == 1.0);
    CHECK(r[2] == -0.4);
    auto u = d.unit_vector();
    CHECK(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] == doctest::Approx(1.0));
}

TEST_CASE("projection matches the interpolation oracle on all families") {
    LatticeSpec spec(3, 5);
    Object3D obj = random_object(spec, 17);
    Rng rng(18);
    for (Family f : {Family::X, Family::Y, Family::Z})
        for (int trial = 0; trial < 3; ++trial) {
            Direction dir(f, rng.uniform(-0.95, 0.95), rng.uniform(-0.95, 0.95));
            CHECK(max_diff(project(obj, dir), project_oracle(obj, dir)) < 1e-10);
        }
}

TEST_CASE("axis-aligned projection is a plain column sum") {
    LatticeSpec spec(5, 9);
    Object3D obj = random_object(spec, 4);
    Projection2D proj = project(obj, Direction(Family::Z, 0.0, 0.0));
    for (int i = range_lo(5); i <= range_hi(5); ++i)
        for (int j = range_lo(5); j <= range_hi(5); ++j) {
            cplx expect = 0.0;
            for (int k = range_lo(5); k <= range_hi(5); ++k) expect += obj.at(i, j, k);
            CHECK(std::abs(proj.at(i, j) - expect) < 1e-12);
        }
    // Outside Z_n^2 the axis-aligned projection vanishes identically.
    CHECK(std::abs(proj.at(4, 0)) < 1e-12);
    CHECK(std::abs(proj.at(0, -4)) < 1e-12);
}

TEST_CASE("projection preserves total mass") {
    LatticeSpec spec(5, 9);
    Object3D obj = random_object(spec, 8);
    cplx mass = 0.0;
    for (const cplx& v : obj.values) mass += v;
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        Direction dir(static_cast<Family>(trial % 3), rng.uniform(-0.9, 0.9),
                      rng.uniform(-0.9, 0.9));
        Projection2D proj = project(obj, dir);
        cplx proj_mass = 0.0;
        for (const cplx& v : proj.values) proj_mass += v;
        CHECK(std::abs(proj_mass - mass) < 1e-9);
    }
}

TEST_CASE("projection is linear in the object") {
    LatticeSpec spec(3, 5);
    Object3D a = random_object(spec, 31), b = random_object(spec, 32), sum(spec);
    for (std::size_t i = 0; i < sum.values.size(); ++i)
        sum.values[i] = 1.5 * a.values[i] - cplx(0.0, 2.0) * b.values[i];
    Direction dir(Family::X, 0.41, -0.73);
    Projection2D pa = project(a, dir), pb = project(b, dir), ps = project(sum, dir);
    for (std::size_t i = 0; i < ps.values.size(); ++i)
        CHECK(std::abs(ps.values[i] - (1.5 * pa.values[i] - cplx(0.0, 2.0) * pb.values[i])) <
              1e-10);
}

TEST_CASE("projection rejects boundary slopes") {
    LatticeSpec spec(3, 5);
    Object3D obj = random_object(spec, 1);
    CHECK_THROWS(project(obj, Direction(Family::X, 1.0, 0.0)));
    CHECK_THROWS(project(obj, Direction(Family::Y, 0.0, -1.0)));
    CHECK_NOTHROW(project(obj, Direction(Family::X, 0.999, 0.0)));
}

TEST_CASE("support bound formula and concentration inside the box") {
    LatticeSpec spec(7, 13);
    auto bounds = support_bounds(Direction(Family::X, 0.5, 0.99), spec);
    CHECK(bounds.first == 2 * static_cast<int>(std::floor(1.5 * 6 / 2)) + 1);
    CHECK(bounds.second == 2 * static_cast<int>(std::floor(1.99 * 6 / 2)) + 1);
    CHECK(support_bounds(Direction(Family::Z, 0.0, 0.0), spec) == std::make_pair(7, 7));

    // Integer slopes make the band-limited interpolation exact on the lattice,
    // so the projection vanishes identically outside the box.
    Object3D obj = random_object(spec, 77);
    Projection2D axis = project(obj, Direction(Family::Y, 0.0, 0.0));
    for (int c1 = range_lo(13); c1 <= range_hi(13); ++c1)
        for (int c2 = range_lo(13); c2 <= range_hi(13); ++c2)
            if (std::abs(c1) > 3 || std::abs(c2) > 3) CHECK(std::abs(axis.at(c1, c2)) < 1e-12);

    // Fractional slopes leak (interpolation tails fall off like 1/distance,
    // they are not compactly supported), but the box still captures the bulk
    // of the energy and the peak amplitude stays inside it.
    Rng rng(78);
    for (int trial = 0; trial < 10; ++trial) {
        Direction dir(static_cast<Family>(trial % 3), rng.uniform(-0.97, 0.97),
                      rng.uniform(-0.97, 0.97));
        auto [la, lb] = support_bounds(dir, spec);
        Projection2D proj = project(obj, dir);
        double in_energy = 0.0, total = 0.0, in_peak = 0.0, out_peak = 0.0;
        for (int c1 = range_lo(13); c1 <= range_hi(13); ++c1)
            for (int c2 = range_lo(13); c2 <= range_hi(13); ++c2) {
                double e = std::norm(proj.at(c1, c2));
                bool inside = c1 >= range_lo(la) && c1 <= range_hi(la) && c2 >= range_lo(lb) &&
                              c2 <= range_hi(lb);
                total += e;
                if (inside) {
                    in_energy += e;
                    in_peak = std::max(in_peak, e);
                } else {
                    out_peak = std::max(out_peak, e);
                }
            }
        CHECK(in_energy > 0.75 * total);
        CHECK(in_peak > out_peak);
    }
}

TEST_CASE("phase and hybrid projections are elementwise maps of the line sums") {
    LatticeSpec spec(3, 5, 1.7);
    Object3D obj = random_object(spec, 55, true);
    Direction dir(Family::Y, 0.21, 0.63);
    Projection2D lin = project(obj, dir);
    Projection2D ph = phase_projection(obj, dir);
    Projection2D h1 = hybrid_projection(obj, dir, 1.0);
    Projection2D hbig = hybrid_projection(obj, dir, 1e6);
    for (std::size_t i = 0; i < lin.values.size(); ++i) {
        cplx u = cplx(0.0, 1.7) * lin.values[i];
        CHECK(std::abs(ph.values[i] - std::exp(u)) < 1e-10);
        CHECK(std::abs(h1.values[i] - (1.0 + u)) < 1e-10);
        CHECK(std::abs(hbig.values[i] - std::exp(u)) < 1e-4);
        CHECK(std::abs(std::abs(ph.values[i]) - 1.0) < 1e-12);
    }
    CHECK_THROWS(hybrid_projection(obj, dir, 0.5));
}

TEST_CASE("raw projection kernels satisfy the adjoint identity") {
    LatticeSpec spec(5, 9);
    Object3D f = random_object(spec, 61);
    Rng rng(62);
    std::vector<cplx> g(static_cast<std::size_t>(9) * 9);
    for (cplx& v : g) v = cplx(rng.normal(), rng.normal());
    for (Family fam : {Family::X, Family::Y, Family::Z}) {
        Direction dir(fam, rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9));
        std::vector<cplx> pf(g.size(), 0.0);
        project_raw(f.values.data(), spec, dir, pf.data());
        std::vector<cplx> atg(f.values.size(), 0.0);
        project_adjoint_raw(g.data(), spec, dir, atg.data());
        cplx lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) lhs += std::conj(pf[i]) * g[i];
        for (std::size_t i = 0; i < atg.size(); ++i) rhs += std::conj(f.values[i]) * atg[i];
        CHECK(std::abs(lhs - rhs) < 1e-8 * (std::abs(lhs) + 1.0));
    }
}

TEST_CASE("slice embed and crop are mutually adjoint") {
    LatticeSpec spec(5, 9);
    Object3D f = random_object(spec, 71);
    Rng rng(72);
    std::vector<cplx> g(static_cast<std::size_t>(9) * 9);
    for (cplx& v : g) v = cplx(rng.normal(), rng.normal());
    for (int s = range_lo(5); s <= range_hi(5); ++s) {
        std::vector<cplx> img(g.size(), 0.0);
        slice_embed(f.values.data(), spec, Family::Y, s, img.data());
        std::vector<cplx> back(f.values.size(), 0.0);
        slice_crop_add(g.data(), spec, Family::Y, s, back.data());
        cplx lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) lhs += std::conj(img[i]) * g[i];
        for (std::size_t i = 0; i < back.size(); ++i) rhs += std::conj(f.values[i]) * back[i];
        CHECK(std::abs(lhs - rhs) < 1e-10 * (std::abs(lhs) + 1.0));
    }
}
