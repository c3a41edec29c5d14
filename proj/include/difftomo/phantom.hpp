#pragma once

#include "difftomo/io.hpp"
#include "difftomo/lattice.hpp"

namespace difftomo {

// Slice-and-stack: an (n k) x (n k) raster with k^2 = n is cut into n tiles
// of n x n (row-major) which become the z-slices of an n^3 real object.
Object3D build_phantom(const Raster& raster, const LatticeSpec& spec);

// Deterministic built-in rasters sized for slice-and-stack at extent n:
//   "blobs"   — smooth sum of Gaussian bumps
//   "checker" — per-tile checkerboard (index bookkeeping aid)
Raster builtin_raster(const std::string& name, int n);

// Convenience: build_phantom(builtin_raster(name, n)).
Object3D builtin_phantom(const std::string& name, const LatticeSpec& spec);

}  // namespace difftomo
