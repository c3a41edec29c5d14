#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace difftomo {

// Deterministic RNG used everywhere seeds appear. Distribution code is
// self-contained so streams do not depend on the standard library vendor.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal (Box-Muller, no cached spare so the stream is simple).
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Poisson draw: inversion for small means, transformed rejection (PTRS)
    // for the mid range, rounded normal for very large means.
    long long poisson(double mean);

    // Derive an independent stream from (seed, index) without correlation.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

  private:
    std::mt19937_64 engine_;
};

}  // namespace difftomo
