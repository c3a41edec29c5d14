#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "difftomo/projector.hpp"

namespace difftomo {

struct TiltScheme {
    std::vector<Direction> directions;
    double epsilon = 0.0;  // angular adjacency threshold, radians
    std::optional<std::uint64_t> seed;
};

struct DiversityReport {
    bool satisfied = false;
    double min_node_gap = 0.0;            // over all tested nonzero (xi, eta)
    std::array<int, 2> worst_freq{0, 0};  // frequency pair attaining the gap
    std::pair<int, int> worst_pair{-1, -1};  // direction indices at that gap
};

struct TriangleRegion {
    Family family = Family::X;
    double alpha_min = 0.0, alpha_max = 1.0;
    double beta_min = 0.0, beta_max = 1.0;
    bool with_anchors = false;  // append (0,alpha0,beta0) and (0,0,1)
};

// count directions with slopes i.i.d. uniform over the region; anchors are
// appended when requested (alpha0 != 0 drawn away from zero).
TiltScheme random_tilt_scheme(int n, const TriangleRegion& region, int count,
                              std::uint64_t seed);

// 3n directions, n per family, slopes i.i.d. uniform on (-1, 1).
TiltScheme tset_scheme(int n, std::uint64_t seed);

// count directions equally spaced along the cone of half-angle
// arccos(1/sqrt(3)) about (1,1,1), from (1,0,0) through (0,1,0) to (0,0,1).
TiltScheme conical_tilt_scheme(int count);

// Polyline length of the orbit traced on the unit sphere (chord sum over
// consecutive unit direction vectors).
double scheme_polyline_length(const TiltScheme& scheme);

// Four dual-axis arcs: {(1,l/q,a)}, {(l/q,1,a)}, {(0,1,l/q)}, {(0,l/q,1)},
// l = 0..q, duplicates removed.
TiltScheme dual_axis_scheme(int q, double alpha);

// Edge (i,j) iff the angle between unit vectors is <= epsilon (no antipodal
// identification).
std::vector<std::vector<int>> epsilon_graph(const TiltScheme& scheme);
bool is_epsilon_connected(const TiltScheme& scheme);

// Diversity condition: for every nonzero (xi,eta) in Z_p^2 the n node values
// alpha_l xi + beta_l eta must be distinct mod p, measured as unit-circle
// gaps |e^{-i2pi u/p} - e^{-i2pi v/p}| > tol. Uses the first n directions of
// the first family holding at least n.
DiversityReport diversity_check(const TiltScheme& scheme, const LatticeSpec& spec,
                                double tol = 1e-9);

// Solve sum_j e^{-i 2 pi xi_i j / p} x_j = rhs_i, j in Z_n, by progressive
// (Bjorck-Pereyra style) elimination with a dense pivoted fallback.
std::vector<cplx> vandermonde_solve(const std::vector<double>& nodes,
                                    const std::vector<cplx>& rhs, const LatticeSpec& spec,
                                    double tol = 1e-9);

// Plain-text scheme files: optional `epsilon=`/`seed=` headers, then one
// `family alpha beta` line per direction.
std::string scheme_to_text(const TiltScheme& scheme);
TiltScheme scheme_from_text(const std::string& text);
void save_scheme(const TiltScheme& scheme, const std::string& path);
TiltScheme load_scheme(const std::string& path);

}  // namespace difftomo
