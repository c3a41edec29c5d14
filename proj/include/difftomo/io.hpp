#pragma once

#include <string>

#include "difftomo/measurement.hpp"
#include "difftomo/projector.hpp"

namespace difftomo {

// "VOL1": magic, n, p as int32 LE, then n^3 complex values as little-endian
// f64 (re, im) pairs, row-major over ascending centered (i, j, k).
void save_volume(const Object3D& obj, const std::string& path);
Object3D load_volume(const std::string& path);

// "PRJ1": magic, count, p as int32 LE, then per projection a family byte,
// alpha, beta as f64 LE, and p^2 complex values (row-major ascending centered
// coordinates).
void save_projections(const std::vector<std::pair<Direction, Projection2D>>& stack,
                      const std::string& path);
std::vector<std::pair<Direction, Projection2D>> load_projections(const std::string& path);

// "PAT1": same layout as PRJ1 with an oversampled flag byte per pattern and
// real f64 intensities.
void save_patterns(const std::vector<std::pair<Direction, DiffractionPattern>>& stack,
                   const std::string& path);
std::vector<std::pair<Direction, DiffractionPattern>> load_patterns(const std::string& path);

// CSV export of a pattern stack: direction index, row, col, intensity.
void save_patterns_csv(const std::vector<std::pair<Direction, DiffractionPattern>>& stack,
                       const std::string& path);

// Binary 8-bit grayscale PGM (P5), values scaled to [0, 1].
struct Raster {
    int width = 0, height = 0;
    std::vector<double> pixels;  // row-major
};
Raster load_pgm(const std::string& path);
void save_pgm(const Raster& raster, const std::string& path);

}  // namespace difftomo
