#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace difftomo {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi_v<double>;

// Wrap an arbitrary integer coordinate into storage index [0, m).
inline int wrap(long long v, int m) {
    long long r = v % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

// Lowest coordinate of the centered range of extent m:
// odd m -> -(m-1)/2 .. (m-1)/2, even m -> -m/2 .. m/2-1.
inline int range_lo(int m) { return -(m / 2); }
inline int range_hi(int m) { return range_lo(m) + m - 1; }

// Map a storage index [0, m) back to its centered coordinate.
inline int centered(int idx, int m) { return idx <= range_hi(m) ? idx : idx - m; }

inline cplx unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace difftomo
