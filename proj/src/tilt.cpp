#include "difftomo/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "difftomo/rng.hpp"

namespace difftomo {

namespace {

double angle_between(const Direction& a, const Direction& b) {
    auto u = a.unit_vector(), v = b.unit_vector();
    double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

Direction direction_from_vector(const std::array<double, 3>& v) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) > std::abs(v[axis])) axis = i;
    const double scale = v[axis];
    std::array<double, 3> r{v[0] / scale, v[1] / scale, v[2] / scale};
    auto clamp1 = [](double s) { return std::clamp(s, -1.0, 1.0); };
    switch (axis) {
        case 0: return Direction(Family::X, clamp1(r[1]), clamp1(r[2]));
        case 1: return Direction(Family::Y, clamp1(r[0]), clamp1(r[2]));
        default: return Direction(Family::Z, clamp1(r[0]), clamp1(r[1]));
    }
}

bool same_ray(const Direction& a, const Direction& b) {
    auto u = a.unit_vector(), v = b.unit_vector();
    return std::abs(u[0] - v[0]) < 1e-12 && std::abs(u[1] - v[1]) < 1e-12 &&
           std::abs(u[2] - v[2]) < 1e-12;
}

const char* family_letter(Family f) {
    switch (f) {
        case Family::X: return "x";
        case Family::Y: return "y";
        default: return "z";
    }
}

}  // namespace

TiltScheme random_tilt_scheme(int n, const TriangleRegion& region, int count,
                              std::uint64_t seed) {
    if (count < n) throw std::invalid_argument("random_tilt_scheme: count < n");
    Rng rng(seed);
    TiltScheme scheme;
    scheme.epsilon = 0.5 / n;
    scheme.seed = seed;
    scheme.directions.reserve(static_cast<std::size_t>(count) + 2);
    for (int i = 0; i < count; ++i) {
        double a = rng.uniform(region.alpha_min, region.alpha_max);
        double b = rng.uniform(region.beta_min, region.beta_max);
        scheme.directions.emplace_back(region.family, a, b);
    }
    if (region.with_anchors) {
        // (0, alpha0, beta0) with alpha0 != 0 and |beta0/alpha0| < 1, plus (0,0,1).
        double alpha0 = rng.uniform(0.5, 0.9);
        double beta0 = rng.uniform(0.0, 0.5) * alpha0;
        scheme.directions.emplace_back(Family::Y, 0.0, beta0 / alpha0);
        scheme.directions.emplace_back(Family::Z, 0.0, 0.0);
    }
    return scheme;
}

TiltScheme tset_scheme(int n, std::uint64_t seed) {
    Rng rng(seed);
    TiltScheme scheme;
    scheme.epsilon = 0.5 / n;
    scheme.seed = seed;
    for (Family f : {Family::X, Family::Y, Family::Z})
        for (int i = 0; i < n; ++i)
            scheme.directions.emplace_back(f, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return scheme;
}

TiltScheme conical_tilt_scheme(int count) {
    if (count < 3) throw std::invalid_argument("conical_tilt_scheme: count must be >= 3");
    // Rotate (1,0,0) about (1,1,1)/sqrt(3); thirds of the full turn land on
    // (0,1,0) and (0,0,1).
    const double range = 4.0 * pi / 3.0;
    const std::array<double, 3> axis{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
                                     1.0 / std::sqrt(3.0)};
    const std::array<double, 3> v0{1.0, 0.0, 0.0};
    const double dot = axis[0] * v0[0] + axis[1] * v0[1] + axis[2] * v0[2];
    const std::array<double, 3> cross{axis[1] * v0[2] - axis[2] * v0[1],
                                      axis[2] * v0[0] - axis[0] * v0[2],
                                      axis[0] * v0[1] - axis[1] * v0[0]};
    TiltScheme scheme;
    scheme.epsilon = 1.5 * range / (count - 1);
    scheme.directions.reserve(count);
    for (int i = 0; i < count; ++i) {
        double th = range * i / (count - 1);
        double c = std::cos(th), s = std::sin(th);
        std::array<double, 3> v{};
        for (int d = 0; d < 3; ++d) v[d] = v0[d] * c + cross[d] * s + axis[d] * dot * (1 - c);
        scheme.directions.push_back(direction_from_vector(v));
    }
    return scheme;
}

double scheme_polyline_length(const TiltScheme& scheme) {
    double len = 0.0;
    for (std::size_t i = 1; i < scheme.directions.size(); ++i) {
        auto a = scheme.directions[i - 1].unit_vector();
        auto b = scheme.directions[i].unit_vector();
        len += std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                         (a[2] - b[2]) * (a[2] - b[2]));
    }
    return len;
}

TiltScheme dual_axis_scheme(int q, double alpha) {
    if (q < 1) throw std::invalid_argument("dual_axis_scheme: q must be >= 1");
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("dual_axis_scheme: alpha must be in [0,1)");
    TiltScheme scheme;
    scheme.epsilon = 1.5 * (pi / 2.0) / q;
    auto push_unique = [&](const Direction& d) {
        for (const Direction& e : scheme.directions)
            if (same_ray(d, e)) return;
        scheme.directions.push_back(d);
    };
    for (int l = 0; l <= q; ++l) push_unique(Direction(Family::X, double(l) / q, alpha));
    for (int l = 0; l <= q; ++l) push_unique(Direction(Family::Y, double(l) / q, alpha));
    for (int l = 0; l <= q; ++l) push_unique(Direction(Family::Y, 0.0, double(l) / q));
    for (int l = 0; l <= q; ++l) push_unique(Direction(Family::Z, 0.0, double(l) / q));
    return scheme;
}

std::vector<std::vector<int>> epsilon_graph(const TiltScheme& scheme) {
    if (scheme.directions.empty())
        throw std::invalid_argument("epsilon_graph: empty scheme");
    const int m = static_cast<int>(scheme.directions.size());
    std::vector<std::vector<int>> adj(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (angle_between(scheme.directions[i], scheme.directions[j]) <= scheme.epsilon) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    return adj;
}

bool is_epsilon_connected(const TiltScheme& scheme) {
    auto adj = epsilon_graph(scheme);
    const int m = static_cast<int>(adj.size());
    std::vector<char> seen(m, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
    }
    return visited == m;
}

DiversityReport diversity_check(const TiltScheme& scheme, const LatticeSpec& spec,
                                double tol) {
    const int n = spec.n, p = spec.p;
    std::vector<const Direction*> dirs;
    for (Family f : {Family::X, Family::Y, Family::Z}) {
        dirs.clear();
        for (const Direction& d : scheme.directions)
            if (d.family == f) dirs.push_back(&d);
        if (static_cast<int>(dirs.size()) >= n) break;
    }
    if (static_cast<int>(dirs.size()) < n)
        throw std::invalid_argument("diversity_check: no family with >= n directions");
    dirs.resize(n);

    DiversityReport report;
    report.min_node_gap = std::numeric_limits<double>::infinity();
    std::vector<cplx> node(n);
    for (int xi = range_lo(p); xi <= range_hi(p); ++xi)
        for (int eta = range_lo(p); eta <= range_hi(p); ++eta) {
            if (xi == 0 && eta == 0) continue;
            for (int l = 0; l < n; ++l)
                node[l] = unit_phase(-2.0 * pi * (dirs[l]->alpha * xi + dirs[l]->beta * eta) / p);
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    double gap = std::abs(node[a] - node[b]);
                    if (gap < report.min_node_gap) {
                        report.min_node_gap = gap;
                        report.worst_freq = {xi, eta};
                        report.worst_pair = {a, b};
                    }
                }
        }
    report.satisfied = report.min_node_gap > tol;
    return report;
}

std::vector<cplx> vandermonde_solve(const std::vector<double>& nodes,
                                    const std::vector<cplx>& rhs, const LatticeSpec& spec,
                                    double tol) {
    const int n = spec.n, p = spec.p;
    if (static_cast<int>(nodes.size()) != n || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("vandermonde_solve: need exactly n nodes and n rhs values");

    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) z[i] = unit_phase(-2.0 * pi * nodes[i] / p);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::abs(z[i] - z[j]));
    if (n > 1 && min_gap <= tol) {
        std::ostringstream msg;
        msg << "vandermonde_solve: nodes nearly coincident mod p (min gap " << min_gap << ")";
        throw std::runtime_error(msg.str());
    }

    // Factor out the lowest power so rows become 1, z, ..., z^{n-1}.
    const int lo = range_lo(n);
    std::vector<cplx> b(n);
    for (int i = 0; i < n; ++i) {
        cplx shift = 1.0;
        for (int m = 0; m < -lo; ++m) shift *= z[i];
        b[i] = rhs[i] * shift;
    }

    // Progressive elimination: Newton divided differences, then expansion.
    std::vector<cplx> c(b);
    for (int k = 0; k < n - 1; ++k)
        for (int j = n - 1; j > k; --j) c[j] = (c[j] - c[j - 1]) / (z[j] - z[j - k - 1]);
    for (int k = n - 2; k >= 0; --k)
        for (int j = k; j < n - 1; ++j) c[j] -= z[k] * c[j + 1];

    auto residual = [&](const std::vector<cplx>& x) {
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx acc = 0.0, pw = 1.0;
            for (int m = 0; m < n; ++m) {
                acc += x[m] * pw;
                pw *= z[i];
            }
            err += std::norm(acc - b[i]);
            ref += std::norm(b[i]);
        }
        return std::sqrt(err) / (std::sqrt(ref) + 1e-300);
    };

    if (residual(c) > 1e-9) {
        // Dense pivoted elimination fallback for poorly conditioned systems.
        std::vector<std::vector<cplx>> mat(n, std::vector<cplx>(n + 1));
        for (int i = 0; i < n; ++i) {
            cplx pw = 1.0;
            for (int m = 0; m < n; ++m) {
                mat[i][m] = pw;
                pw *= z[i];
            }
            mat[i][n] = b[i];
        }
        for (int col = 0; col < n; ++col) {
            int pivot = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(mat[r][col]) > std::abs(mat[pivot][col])) pivot = r;
            std::swap(mat[col], mat[pivot]);
            for (int r = col + 1; r < n; ++r) {
                cplx factor = mat[r][col] / mat[col][col];
                for (int cc = col; cc <= n; ++cc) mat[r][cc] -= factor * mat[col][cc];
            }
        }
        std::vector<cplx> x(n);
        for (int r = n - 1; r >= 0; --r) {
            cplx acc = mat[r][n];
            for (int cc = r + 1; cc < n; ++cc) acc -= mat[r][cc] * x[cc];
            x[r] = acc / mat[r][r];
        }
        if (residual(x) < residual(c)) c = x;
    }
    return c;  // c[m] is the coefficient at j = range_lo(n) + m
}

std::string scheme_to_text(const TiltScheme& scheme) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "epsilon=%.17g\n", scheme.epsilon);
    out << buf;
    if (scheme.seed) out << "seed=" << *scheme.seed << "\n";
    for (const Direction& d : scheme.directions) {
        std::snprintf(buf, sizeof buf, "%s %.17g %.17g\n", family_letter(d.family), d.alpha,
                      d.beta);
        out << buf;
    }
    return out.str();
}

TiltScheme scheme_from_text(const std::string& text) {
    TiltScheme scheme;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("epsilon=", 0) == 0) {
            scheme.epsilon = std::stod(line.substr(8));
            continue;
        }
        if (line.rfind("seed=", 0) == 0) {
            scheme.seed = std::stoull(line.substr(5));
            continue;
        }
        std::istringstream row(line);
        std::string fam;
        double a, b;
        if (!(row >> fam >> a >> b))
            throw std::invalid_argument("scheme: malformed line: " + line);
        Family f;
        if (fam == "x") f = Family::X;
        else if (fam == "y") f = Family::Y;
        else if (fam == "z") f = Family::Z;
        else throw std::invalid_argument("scheme: unknown family: " + fam);
        scheme.directions.emplace_back(f, a, b);
    }
    if (scheme.epsilon <= 0.0) throw std::invalid_argument("scheme: missing epsilon header");
    return scheme;
}

void save_scheme(const TiltScheme& scheme, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("scheme: cannot open for writing: " + path);
    out << scheme_to_text(scheme);
}

TiltScheme load_scheme(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("scheme: cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scheme_from_text(buf.str());
}

}  // namespace difftomo
