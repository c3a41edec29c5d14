#include "difftomo/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace difftomo {

namespace {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("file: truncated read");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("file: cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file: cannot open: " + path);
    return in;
}

void check_magic(std::ifstream& in, const char* magic) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(std::string("file: bad magic, expected ") + magic);
}

}  // namespace

void save_volume(const Object3D& obj, const std::string& path) {
    auto out = open_out(path);
    out.write("VOL1", 4);
    put<std::int32_t>(out, obj.spec.n);
    put<std::int32_t>(out, obj.spec.p);
    const int n = obj.spec.n;
    for (int i = range_lo(n); i <= range_hi(n); ++i)
        for (int j = range_lo(n); j <= range_hi(n); ++j)
            for (int k = range_lo(n); k <= range_hi(n); ++k) {
                const cplx& v = obj.at(i, j, k);
                put(out, v.real());
                put(out, v.imag());
            }
}

Object3D load_volume(const std::string& path) {
    auto in = open_in(path);
    check_magic(in, "VOL1");
    const int n = get<std::int32_t>(in);
    const int p = get<std::int32_t>(in);
    Object3D obj(LatticeSpec(n, p));
    for (int i = range_lo(n); i <= range_hi(n); ++i)
        for (int j = range_lo(n); j <= range_hi(n); ++j)
            for (int k = range_lo(n); k <= range_hi(n); ++k) {
                double re = get<double>(in), im = get<double>(in);
                obj.at(i, j, k) = cplx(re, im);
            }
    return obj;
}

void save_projections(const std::vector<std::pair<Direction, Projection2D>>& stack,
                      const std::string& path) {
    auto out = open_out(path);
    out.write("PRJ1", 4);
    put<std::int32_t>(out, static_cast<std::int32_t>(stack.size()));
    put<std::int32_t>(out, stack.empty() ? 0 : stack.front().second.spec.p);
    for (const auto& [dir, proj] : stack) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(dir.family));
        put(out, dir.alpha);
        put(out, dir.beta);
        const int p = proj.spec.p;
        for (int a = range_lo(p); a <= range_hi(p); ++a)
            for (int b = range_lo(p); b <= range_hi(p); ++b) {
                const cplx& v = proj.at(a, b);
                put(out, v.real());
                put(out, v.imag());
            }
    }
}

std::vector<std::pair<Direction, Projection2D>> load_projections(const std::string& path) {
    auto in = open_in(path);
    check_magic(in, "PRJ1");
    const int count = get<std::int32_t>(in);
    const int p = get<std::int32_t>(in);
    const int n = (p + 1) / 2;
    LatticeSpec spec(n, p);
    std::vector<std::pair<Direction, Projection2D>> stack;
    stack.reserve(count);
    for (int t = 0; t < count; ++t) {
        Family family = static_cast<Family>(get<std::uint8_t>(in));
        double alpha = get<double>(in), beta = get<double>(in);
        Direction dir(family, alpha, beta);
        Projection2D proj(spec, dir);
        for (int a = range_lo(p); a <= range_hi(p); ++a)
            for (int b = range_lo(p); b <= range_hi(p); ++b) {
                double re = get<double>(in), im = get<double>(in);
                proj.at(a, b) = cplx(re, im);
            }
        stack.emplace_back(dir, std::move(proj));
    }
    return stack;
}

void save_patterns(const std::vector<std::pair<Direction, DiffractionPattern>>& stack,
                   const std::string& path) {
    auto out = open_out(path);
    out.write("PAT1", 4);
    put<std::int32_t>(out, static_cast<std::int32_t>(stack.size()));
    put<std::int32_t>(out, stack.empty() ? 0 : stack.front().second.spec.p);
    for (const auto& [dir, pat] : stack) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(dir.family));
        put(out, dir.alpha);
        put(out, dir.beta);
        put<std::uint8_t>(out, pat.oversampled ? 1 : 0);
        const int side = pat.side();
        for (int a = range_lo(side); a <= range_hi(side); ++a)
            for (int b = range_lo(side); b <= range_hi(side); ++b)
                put(out, pat.intensities[static_cast<std::size_t>(wrap(a, side)) * side +
                                         wrap(b, side)]);
    }
}

std::vector<std::pair<Direction, DiffractionPattern>> load_patterns(const std::string& path) {
    auto in = open_in(path);
    check_magic(in, "PAT1");
    const int count = get<std::int32_t>(in);
    const int p = get<std::int32_t>(in);
    const int n = (p + 1) / 2;
    LatticeSpec spec(n, p);
    std::vector<std::pair<Direction, DiffractionPattern>> stack;
    stack.reserve(count);
    for (int t = 0; t < count; ++t) {
        Family family = static_cast<Family>(get<std::uint8_t>(in));
        double alpha = get<double>(in), beta = get<double>(in);
        Direction dir(family, alpha, beta);
        bool oversampled = get<std::uint8_t>(in) != 0;
        DiffractionPattern pat(spec, oversampled);
        const int side = pat.side();
        for (int a = range_lo(side); a <= range_hi(side); ++a)
            for (int b = range_lo(side); b <= range_hi(side); ++b)
                pat.intensities[static_cast<std::size_t>(wrap(a, side)) * side +
                                wrap(b, side)] = get<double>(in);
        stack.emplace_back(dir, std::move(pat));
    }
    return stack;
}

void save_patterns_csv(const std::vector<std::pair<Direction, DiffractionPattern>>& stack,
                       const std::string& path) {
    auto out = open_out(path);
    out << "direction,row,col,intensity\n";
    char buf[64];
    for (std::size_t t = 0; t < stack.size(); ++t) {
        const auto& pat = stack[t].second;
        const int side = pat.side();
        for (int a = range_lo(side); a <= range_hi(side); ++a)
            for (int b = range_lo(side); b <= range_hi(side); ++b) {
                std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g\n", t, a, b,
                              pat.intensities[static_cast<std::size_t>(wrap(a, side)) * side +
                                              wrap(b, side)]);
                out << buf;
            }
    }
}

Raster load_pgm(const std::string& path) {
    auto in = open_in(path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("pgm: only binary P5 supported");
    auto next_int = [&in]() {
        // Skip whitespace and '#' comment lines.
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        int v;
        in >> v;
        if (!in) throw std::runtime_error("pgm: malformed header");
        return v;
    };
    Raster raster;
    raster.width = next_int();
    raster.height = next_int();
    int maxval = next_int();
    if (maxval != 255) throw std::runtime_error("pgm: only 8-bit images supported");
    in.get();  // single whitespace before pixel data
    std::vector<unsigned char> bytes(static_cast<std::size_t>(raster.width) * raster.height);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw std::runtime_error("pgm: truncated pixel data");
    raster.pixels.resize(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) raster.pixels[i] = bytes[i] / 255.0;
    return raster;
}

void save_pgm(const Raster& raster, const std::string& path) {
    auto out = open_out(path);
    out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
    for (double v : raster.pixels) {
        double clamped = std::min(std::max(v, 0.0), 1.0);
        out.put(static_cast<char>(static_cast<unsigned char>(clamped * 255.0 + 0.5)));
    }
}

}  // namespace difftomo
