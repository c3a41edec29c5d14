#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "difftomo/measurement.hpp"
#include "difftomo/rng.hpp"
#include "difftomo/spectral.hpp"

using namespace difftomo;

namespace {

std::vector<cplx> random_image(int side, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> img(static_cast<std::size_t>(side) * side);
    for (cplx& v : img) v = cplx(rng.normal(), rng.normal());
    return img;
}

double max_pattern_diff(const DiffractionPattern& a, const DiffractionPattern& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.intensities.size(); ++i)
        m = std::max(m, std::abs(a.intensities[i] - b.intensities[i]));
    return m;
}

}  // namespace

TEST_CASE("phase mask is unit modulus and deterministic") {
    LatticeSpec spec(5, 9);
    PhaseMask m1 = random_phase_mask(spec, 11), m2 = random_phase_mask(spec, 11);
    PhaseMask m3 = random_phase_mask(spec, 12);
    CHECK(m1.phases == m2.phases);
    CHECK(m1.phases != m3.phases);
    bool varied = false;
    for (std::size_t i = 0; i < m1.phases.size(); ++i) {
        CHECK(m1.phases[i] >= 0.0);
        CHECK(m1.phases[i] < 2.0 * pi);
        CHECK(std::abs(std::abs(m1.value(i)) - 1.0) < 1e-15);
        if (std::abs(m1.phases[i] - m1.phases[0]) > 0.1) varied = true;
    }
    CHECK(varied);
}

TEST_CASE("pattern equals squared transform magnitude, with and without mask") {
    LatticeSpec spec(5, 9);
    std::vector<cplx> img = random_image(9, 21);
    PhaseMask mask = random_phase_mask(spec, 22);

    DiffractionPattern plain = diffraction_pattern(img, nullptr, false, spec);
    std::vector<cplx> hat = dft2(img, 9);
    for (std::size_t i = 0; i < hat.size(); ++i)
        CHECK(plain.intensities[i] == doctest::Approx(std::norm(hat[i])).epsilon(1e-12));

    DiffractionPattern coded = diffraction_pattern(img, &mask, false, spec);
    std::vector<cplx> masked(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) masked[i] = mask.value(i) * img[i];
    std::vector<cplx> mhat = dft2(masked, 9);
    for (std::size_t i = 0; i < mhat.size(); ++i)
        CHECK(coded.intensities[i] == doctest::Approx(std::norm(mhat[i])).epsilon(1e-12));
}

TEST_CASE("oversampled pattern is the transform of the padded image") {
    LatticeSpec spec(3, 5);
    std::vector<cplx> img = random_image(5, 31);
    DiffractionPattern over = diffraction_pattern(img, nullptr, true, spec);
    CHECK(over.side() == 9);
    std::vector<cplx> padded = oversample_embed(img, spec);
    std::vector<cplx> hat = dft2(padded, 9);
    for (std::size_t i = 0; i < hat.size(); ++i)
        CHECK(over.intensities[i] == doctest::Approx(std::norm(hat[i])).epsilon(1e-11));
    // Embedding is placement only: total energy is preserved.
    double e1 = 0.0, e2 = 0.0;
    for (const cplx& v : img) e1 += std::norm(v);
    for (const cplx& v : padded) e2 += std::norm(v);
    CHECK(e1 == doctest::Approx(e2));
}

TEST_CASE("trivial ambiguities act as expected on arrays") {
    const int side = 5;
    std::vector<cplx> img = random_image(side, 41);
    // Translation composes additively and is cyclic.
    auto t1 = ambiguity_variant(img, side, AmbiguityKind::Translate, {1, 2});
    auto t2 = ambiguity_variant(t1, side, AmbiguityKind::Translate, {4, 3});
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(t2[i] - img[i]) < 1e-15);
    // Conjugate flip is an involution.
    auto f1 = ambiguity_variant(img, side, AmbiguityKind::ConjugateFlip, {2, 4});
    auto f2 = ambiguity_variant(f1, side, AmbiguityKind::ConjugateFlip, {2, 4});
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(f2[i] - img[i]) < 1e-15);
    // Global phase keeps magnitudes.
    auto g = ambiguity_variant(img, side, AmbiguityKind::GlobalPhase, {0, 0}, 1.234);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(std::abs(g[i]) - std::abs(img[i])) < 1e-14);
}

TEST_CASE("uncoded patterns are blind to the trivial ambiguities") {
    LatticeSpec spec(3, 5);
    std::vector<cplx> img = random_image(5, 51);
    // Invariance is a property of the grid the transform is taken over: the
    // plain pattern uses the p-grid, the oversampled one the padded grid.
    {
        DiffractionPattern base = diffraction_pattern(img, nullptr, false, spec);
        auto t = ambiguity_variant(img, 5, AmbiguityKind::Translate, {2, 3});
        auto f = ambiguity_variant(img, 5, AmbiguityKind::ConjugateFlip, {1, 4});
        auto g = ambiguity_variant(img, 5, AmbiguityKind::GlobalPhase, {0, 0}, 0.77);
        CHECK(max_pattern_diff(base, diffraction_pattern(t, nullptr, false, spec)) < 1e-9);
        CHECK(max_pattern_diff(base, diffraction_pattern(f, nullptr, false, spec)) < 1e-9);
        CHECK(max_pattern_diff(base, diffraction_pattern(g, nullptr, false, spec)) < 1e-9);
    }
    {
        DiffractionPattern base = diffraction_pattern(img, nullptr, true, spec);
        std::vector<cplx> padded = oversample_embed(img, spec);
        const int side = base.side();
        auto check_variant = [&](const std::vector<cplx>& variant) {
            std::vector<cplx> hat = dft2(variant, side);
            double worst = 0.0;
            for (std::size_t i = 0; i < hat.size(); ++i)
                worst = std::max(worst, std::abs(std::norm(hat[i]) - base.intensities[i]));
            CHECK(worst < 1e-9);
        };
        check_variant(ambiguity_variant(padded, side, AmbiguityKind::Translate, {2, 3}));
        check_variant(ambiguity_variant(padded, side, AmbiguityKind::ConjugateFlip, {1, 4}));
        check_variant(ambiguity_variant(padded, side, AmbiguityKind::GlobalPhase, {0, 0}, 0.77));
    }
}

TEST_CASE("a coded pattern separates the translate ambiguity") {
    LatticeSpec spec(3, 5);
    std::vector<cplx> img = random_image(5, 61);
    PhaseMask mask = random_phase_mask(spec, 62);
    DiffractionPattern base = diffraction_pattern(img, &mask, false, spec);
    auto t = ambiguity_variant(img, 5, AmbiguityKind::Translate, {1, 0});
    DiffractionPattern moved = diffraction_pattern(t, &mask, false, spec);
    CHECK(max_pattern_diff(base, moved) > 1e-3);
}

TEST_CASE("count sampling is deterministic and unbiased") {
    LatticeSpec spec(3, 5);
    std::vector<cplx> img = random_image(5, 71);
    DiffractionPattern pattern = diffraction_pattern(img, nullptr, false, spec);
    NoiseSpec noise(3.5, 99);
    DiffractionPattern a = poissonize(pattern, noise);
    DiffractionPattern b = poissonize(pattern, noise);
    CHECK(a.intensities == b.intensities);
    for (double v : a.intensities) {
        CHECK(v >= 0.0);
        CHECK(v == std::floor(v));
    }
    // Averaged over many seeds the counts approach s * intensity.
    std::size_t probe = 7;
    double mean = 0.0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r)
        mean += poissonize(pattern, NoiseSpec(3.5, 1000 + r)).intensities[probe];
    mean /= reps;
    double expect = 3.5 * pattern.intensities[probe];
    CHECK(mean == doctest::Approx(expect).epsilon(0.06));
}

TEST_CASE("noise ratio formula and its inverse") {
    LatticeSpec spec(3, 5);
    std::vector<cplx> img = random_image(5, 81);
    DiffractionPattern pattern = diffraction_pattern(img, nullptr, false, spec);
    double b1 = 0.0, b2 = 0.0;
    for (double v : pattern.intensities) {
        b1 += std::sqrt(v);
        b2 += v;
    }
    for (double s : {0.5, 2.0, 40.0}) {
        CHECK(nsr(pattern, s) == doctest::Approx(b1 / (std::sqrt(s) * b2)).epsilon(1e-14));
        CHECK(nsr(pattern, NoiseSpec(s, 0)) == doctest::Approx(nsr(pattern, s)));
    }
    for (double target : {0.25, 0.5, 1.0}) {
        double s = solve_s_for_nsr(pattern, target);
        CHECK(nsr(pattern, s) == doctest::Approx(target).epsilon(1e-12));
    }
    CHECK_THROWS(NoiseSpec(0.0, 1));
}
