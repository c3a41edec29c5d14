#include "difftomo/phantom.hpp"

#include <cmath>
#include <sstream>

namespace difftomo {

Object3D build_phantom(const Raster& raster, const LatticeSpec& spec) {
    const int n = spec.n;
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (k * k != n)
        throw std::invalid_argument("phantom: slice-and-stack needs square n (k^2 = n)");
    const int side = n * k;
    if (raster.width != side || raster.height != side) {
        std::ostringstream msg;
        msg << "phantom: raster must be " << side << "x" << side << " for n=" << n << ", got "
            << raster.width << "x" << raster.height;
        throw std::invalid_argument(msg.str());
    }
    Object3D obj(spec);
    const int lo = range_lo(n);
    // Tile (tr, tc) in row-major order becomes slice z = lo + tr*k + tc.
    for (int tr = 0; tr < k; ++tr)
        for (int tc = 0; tc < k; ++tc) {
            const int z = lo + tr * k + tc;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    double v = raster.pixels[static_cast<std::size_t>(tr * n + r) * side +
                                             tc * n + c];
                    obj.at(lo + r, lo + c, z) = v;
                }
        }
    return obj;
}

Raster builtin_raster(const std::string& name, int n) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (k * k != n)
        throw std::invalid_argument("phantom: built-in rasters need square n (k^2 = n)");
    const int side = n * k;
    Raster raster;
    raster.width = raster.height = side;
    raster.pixels.assign(static_cast<std::size_t>(side) * side, 0.0);
    if (name == "blobs") {
        // Fixed set of smooth bumps; period chosen so stacked slices vary
        // gently along z as well.
        const double centers[5][3] = {{0.32, 0.27, 0.9},
                                      {0.71, 0.44, 0.7},
                                      {0.45, 0.78, 0.8},
                                      {0.82, 0.81, 0.5},
                                      {0.18, 0.66, 0.6}};
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) {
                double x = (c + 0.5) / side, y = (r + 0.5) / side;
                double v = 0.0;
                for (const auto& ctr : centers) {
                    double dx = x - ctr[0], dy = y - ctr[1];
                    v += ctr[2] * std::exp(-(dx * dx + dy * dy) / 0.02);
                }
                raster.pixels[static_cast<std::size_t>(r) * side + c] = std::min(v, 1.0);
            }
    } else if (name == "checker") {
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c)
                raster.pixels[static_cast<std::size_t>(r) * side + c] =
                    ((r / k + c / k) % 2 == 0) ? 1.0 : 0.0;
    } else {
        throw std::invalid_argument("phantom: unknown built-in raster: " + name);
    }
    return raster;
}

Object3D builtin_phantom(const std::string& name, const LatticeSpec& spec) {
    return build_phantom(builtin_raster(name, spec.n), spec);
}

}  // namespace difftomo
