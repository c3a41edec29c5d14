#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "difftomo/io.hpp"
#include "difftomo/rng.hpp"

using namespace difftomo;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Object3D random_object(const LatticeSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    Object3D obj(spec);
    for (cplx& v : obj.values) v = cplx(rng.normal(), rng.normal());
    return obj;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("volume files round trip bit for bit") {
    TempFile f("io_vol_test.vol");
    Object3D obj = random_object(LatticeSpec(5, 11, 2.5), 3);
    save_volume(obj, f.path);
    Object3D back = load_volume(f.path);
    CHECK(back.spec.n == 5);
    CHECK(back.spec.p == 11);
    CHECK(back.values == obj.values);

    // Writing the loaded copy reproduces the identical byte stream.
    TempFile g("io_vol_test2.vol");
    save_volume(back, g.path);
    CHECK(slurp(f.path) == slurp(g.path));
}

TEST_CASE("projection files round trip") {
    TempFile f("io_prj_test.prj");
    LatticeSpec spec(3, 5);
    Object3D obj = random_object(spec, 7);
    std::vector<std::pair<Direction, Projection2D>> stack;
    Rng rng(8);
    for (int t = 0; t < 4; ++t)
        stack.emplace_back(
            Direction(static_cast<Family>(t % 3), rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)),
            project(obj, Direction(static_cast<Family>(t % 3), 0.1 * t, -0.05 * t)));
    save_projections(stack, f.path);
    auto back = load_projections(f.path);
    REQUIRE(back.size() == stack.size());
    for (std::size_t t = 0; t < stack.size(); ++t) {
        CHECK(back[t].first == stack[t].first);
        CHECK(back[t].second.values == stack[t].second.values);
        CHECK(back[t].second.spec.p == 5);
    }
}

TEST_CASE("pattern files round trip including the oversampled flag") {
    TempFile f("io_pat_test.pat");
    LatticeSpec spec(3, 5);
    Rng rng(9);
    std::vector<std::pair<Direction, DiffractionPattern>> stack;
    for (bool over : {false, true}) {
        DiffractionPattern pat(spec, over);
        for (double& v : pat.intensities) v = rng.uniform() * 100.0;
        stack.emplace_back(Direction(Family::Z, 0.25, -0.5), pat);
    }
    save_patterns(stack, f.path);
    auto back = load_patterns(f.path);
    REQUIRE(back.size() == 2);
    CHECK_FALSE(back[0].second.oversampled);
    CHECK(back[1].second.oversampled);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK(back[t].first == stack[t].first);
        CHECK(back[t].second.intensities == stack[t].second.intensities);
    }

    TempFile c("io_pat_test.csv");
    save_patterns_csv(stack, c.path);
    std::string csv = slurp(c.path);
    CHECK(csv.find("direction,row,col,intensity") != std::string::npos);
}

TEST_CASE("corrupted magic bytes are rejected") {
    TempFile f("io_bad_magic.bin");
    {
        std::ofstream out(f.path, std::ios::binary);
        out << "NOPE" << std::string(64, '\0');
    }
    CHECK_THROWS(load_volume(f.path));
    CHECK_THROWS(load_projections(f.path));
    CHECK_THROWS(load_patterns(f.path));
    CHECK_THROWS(load_volume("io_does_not_exist.vol"));
}

TEST_CASE("grayscale raster round trip") {
    TempFile f("io_test.pgm");
    Raster r;
    r.width = 7;
    r.height = 4;
    Rng rng(10);
    for (int i = 0; i < 28; ++i) r.pixels.push_back(std::round(rng.uniform() * 255.0) / 255.0);
    save_pgm(r, f.path);
    Raster back = load_pgm(f.path);
    CHECK(back.width == 7);
    CHECK(back.height == 4);
    REQUIRE(back.pixels.size() == r.pixels.size());
    for (std::size_t i = 0; i < r.pixels.size(); ++i)
        CHECK(back.pixels[i] == doctest::Approx(r.pixels[i]).epsilon(1e-12));

    // Comments and whitespace in the header are tolerated.
    TempFile g("io_test2.pgm");
    {
        std::ofstream out(g.path, std::ios::binary);
        out << "P5\n# a comment\n2 2\n255\n";
        out.put(char(0)); out.put(char(128)); out.put(char(255)); out.put(char(64));
    }
    Raster small = load_pgm(g.path);
    CHECK(small.width == 2);
    CHECK(small.pixels[2] == doctest::Approx(1.0));

    // Only 8-bit binary is supported.
    TempFile h("io_test3.pgm");
    {
        std::ofstream out(h.path, std::ios::binary);
        out << "P2\n2 2\n255\n0 1 2 3\n";
    }
    CHECK_THROWS(load_pgm(h.path));
}
