#include "difftomo/recon.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "difftomo/fft.hpp"
#include "difftomo/rng.hpp"

namespace difftomo {

namespace {

constexpr std::size_t sq(int p) { return static_cast<std::size_t>(p) * p; }

// Separable fractional-shift phase factors for slice s of a direction.
void make_ramps(const LatticeSpec& spec, const Direction& dir, int s, double sign,
                cplx* rowfac, cplx* colfac) {
    const int p = spec.p;
    for (int w = 0; w < p; ++w) {
        const double freq = centered(w, p);
        rowfac[w] = unit_phase(sign * 2.0 * pi * freq * dir.alpha * s / p);
        colfac[w] = unit_phase(sign * 2.0 * pi * freq * dir.beta * s / p);
    }
}

double dot_real(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return acc;
}

double norm2(const std::vector<cplx>& a) { return dot_real(a, a); }

}  // namespace

MeasurementOperator::MeasurementOperator(const TiltScheme& scheme,
                                         std::optional<PhaseMask> mask,
                                         const LatticeSpec& spec, OperatorFlags flags)
    : scheme_(scheme), mask_(std::move(mask)), spec_(spec), flags_(flags) {
    if (scheme_.directions.empty())
        throw std::invalid_argument("measurement operator: empty scheme");
    if (mask_ && mask_->spec.p != spec_.p)
        throw std::invalid_argument("measurement operator: mask size mismatch");
    for (std::size_t i = 0; i < scheme_.directions.size(); ++i) {
        const Direction& d = scheme_.directions[i];
        if (std::abs(d.alpha) >= 1.0 || std::abs(d.beta) >= 1.0)
            throw std::invalid_argument("measurement operator: boundary slopes unsupported");
        by_family_[static_cast<int>(d.family)].push_back(static_cast<int>(i));
    }
}

MeasurementOperator build_forward(const TiltScheme& scheme, std::optional<PhaseMask> mask,
                                  const LatticeSpec& spec, OperatorFlags flags) {
    return MeasurementOperator(scheme, std::move(mask), spec, flags);
}

void MeasurementOperator::rays_forward(const cplx* obj, cplx* out) const {
    const int n = spec_.n, p = spec_.p;
    const std::size_t area = sq(p);
    std::vector<cplx> slab(static_cast<std::size_t>(n) * area);
    std::vector<cplx> rowfac(p), colfac(p);
    for (int fam = 0; fam < 3; ++fam) {
        const auto& idxs = by_family_[fam];
        if (idxs.empty()) continue;
        // Shared per-slice FFTs for the whole family.
        for (int si = 0; si < n; ++si) {
            cplx* sl = slab.data() + static_cast<std::size_t>(si) * area;
            slice_embed(obj, spec_, static_cast<Family>(fam), range_lo(n) + si, sl);
            fft2(sl, p);
        }
        for (int idx : idxs) {
            const Direction& dir = scheme_.directions[idx];
            cplx* acc = out + static_cast<std::size_t>(idx) * area;
            std::fill(acc, acc + area, cplx(0.0));
            for (int si = 0; si < n; ++si) {
                make_ramps(spec_, dir, range_lo(n) + si, +1.0, rowfac.data(), colfac.data());
                const cplx* sl = slab.data() + static_cast<std::size_t>(si) * area;
                for (int u = 0; u < p; ++u) {
                    const cplx ru = rowfac[u];
                    for (int v = 0; v < p; ++v)
                        acc[static_cast<std::size_t>(u) * p + v] +=
                            sl[static_cast<std::size_t>(u) * p + v] * ru * colfac[v];
                }
            }
            ifft2(acc, p);
        }
    }
}

void MeasurementOperator::rays_adjoint(const cplx* stack, cplx* obj) const {
    const int n = spec_.n, p = spec_.p;
    const std::size_t area = sq(p);
    std::fill(obj, obj + static_cast<std::size_t>(n) * n * n, cplx(0.0));
    std::vector<cplx> slab(static_cast<std::size_t>(n) * area);
    std::vector<cplx> g(area), rowfac(p), colfac(p);
    for (int fam = 0; fam < 3; ++fam) {
        const auto& idxs = by_family_[fam];
        if (idxs.empty()) continue;
        std::fill(slab.begin(), slab.end(), cplx(0.0));
        for (int idx : idxs) {
            const Direction& dir = scheme_.directions[idx];
            std::copy(stack + static_cast<std::size_t>(idx) * area,
                      stack + static_cast<std::size_t>(idx + 1) * area, g.begin());
            fft2(g.data(), p);
            for (int si = 0; si < n; ++si) {
                make_ramps(spec_, dir, range_lo(n) + si, -1.0, rowfac.data(), colfac.data());
                cplx* sl = slab.data() + static_cast<std::size_t>(si) * area;
                for (int u = 0; u < p; ++u) {
                    const cplx ru = rowfac[u];
                    for (int v = 0; v < p; ++v)
                        sl[static_cast<std::size_t>(u) * p + v] +=
                            g[static_cast<std::size_t>(u) * p + v] * ru * colfac[v];
                }
            }
        }
        for (int si = 0; si < n; ++si) {
            cplx* sl = slab.data() + static_cast<std::size_t>(si) * area;
            ifft2(sl, p);
            slice_crop_add(sl, spec_, static_cast<Family>(fam), range_lo(n) + si, obj);
        }
    }
}

std::vector<cplx> MeasurementOperator::forward(const Object3D& f) const {
    if (f.spec.n != spec_.n || f.spec.p != spec_.p)
        throw std::invalid_argument("forward: object spec mismatch");
    const int p = spec_.p, side = pattern_side();
    const std::size_t m = scheme_.directions.size(), area = sq(p);
    std::vector<cplx> rays(m * area);
    rays_forward(f.values.data(), rays.data());
    std::vector<cplx> out(m * sq(side));
    for (std::size_t t = 0; t < m; ++t) {
        cplx* chunk = rays.data() + t * area;
        if (mask_)
            for (std::size_t i = 0; i < area; ++i) chunk[i] *= mask_->value(i);
        if (flags_.oversampled) {
            std::vector<cplx> big =
                oversample_embed(std::vector<cplx>(chunk, chunk + area), spec_);
            fft2(big.data(), side);
            std::copy(big.begin(), big.end(), out.begin() + t * sq(side));
        } else {
            std::copy(chunk, chunk + area, out.begin() + t * sq(side));
            fft2(out.data() + t * sq(side), side);
        }
    }
    return out;
}

Object3D MeasurementOperator::adjoint(const std::vector<cplx>& y) const {
    if (y.size() != measurement_size())
        throw std::invalid_argument("adjoint: measurement size mismatch");
    const int p = spec_.p, side = pattern_side();
    const std::size_t m = scheme_.directions.size(), area = sq(p);
    std::vector<cplx> rays(m * area);
    std::vector<cplx> big(sq(side));
    for (std::size_t t = 0; t < m; ++t) {
        std::copy(y.begin() + t * sq(side), y.begin() + (t + 1) * sq(side), big.begin());
        // Conjugate transpose of the unnormalized DFT is side^2 * inverse DFT.
        ifft2(big.data(), side);
        const double scale = static_cast<double>(side) * side;
        cplx* chunk = rays.data() + t * area;
        if (flags_.oversampled) {
            const int q = side;
            for (int a = range_lo(p); a <= range_hi(p); ++a)
                for (int b = range_lo(p); b <= range_hi(p); ++b)
                    chunk[static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)] =
                        big[static_cast<std::size_t>(wrap(a, q)) * q + wrap(b, q)] * scale;
        } else {
            for (std::size_t i = 0; i < area; ++i) chunk[i] = big[i] * scale;
        }
        if (mask_)
            for (std::size_t i = 0; i < area; ++i) chunk[i] *= std::conj(mask_->value(i));
    }
    Object3D out(spec_);
    rays_adjoint(rays.data(), out.values.data());
    return out;
}

Object3D MeasurementOperator::pinv_apply(const std::vector<cplx>& y, const CgOptions& opts,
                                         const Object3D* warm_start,
                                         bool* cg_converged) const {
    if (y.size() != measurement_size())
        throw std::invalid_argument("pinv_apply: measurement size mismatch");
    const int p = spec_.p, side = pattern_side();
    const std::size_t m = scheme_.directions.size(), area = sq(p);

    // Unitary stage pseudo-inverse: undo DFT (and padding), unmask.
    std::vector<cplx> z(m * area);
    std::vector<cplx> big(sq(side));
    for (std::size_t t = 0; t < m; ++t) {
        std::copy(y.begin() + t * sq(side), y.begin() + (t + 1) * sq(side), big.begin());
        ifft2(big.data(), side);
        cplx* chunk = z.data() + t * area;
        if (flags_.oversampled) {
            const int q = side;
            for (int a = range_lo(p); a <= range_hi(p); ++a)
                for (int b = range_lo(p); b <= range_hi(p); ++b)
                    chunk[static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)] =
                        big[static_cast<std::size_t>(wrap(a, q)) * q + wrap(b, q)];
        } else {
            std::copy(big.begin(), big.end(), chunk);
        }
        if (mask_)
            for (std::size_t i = 0; i < area; ++i) chunk[i] *= std::conj(mask_->value(i));
    }

    // CG on the ray-transform normal equations P*P x = P*z.
    const std::size_t nvox = static_cast<std::size_t>(spec_.n) * spec_.n * spec_.n;
    std::vector<cplx> rhs(nvox);
    rays_adjoint(z.data(), rhs.data());

    std::vector<cplx> x(nvox, cplx(0.0));
    if (warm_start) x = warm_start->values;
    std::vector<cplx> r(nvox), q(nvox), stack(m * area);
    auto gram = [&](const std::vector<cplx>& in, std::vector<cplx>& out_vec) {
        rays_forward(in.data(), stack.data());
        rays_adjoint(stack.data(), out_vec.data());
    };

    gram(x, q);
    for (std::size_t i = 0; i < nvox; ++i) r[i] = rhs[i] - q[i];
    std::vector<cplx> d(r);
    double rs = norm2(r);
    const double target = opts.tol * opts.tol * std::max(norm2(rhs), 1e-300);
    bool converged = rs <= target;
    for (int it = 0; it < opts.max_iters && !converged; ++it) {
        gram(d, q);
        double dq = dot_real(d, q);
        if (dq <= 0.0) break;  // numerically semidefinite; stop
        double alpha = rs / dq;
        for (std::size_t i = 0; i < nvox; ++i) {
            x[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        double rs_new = norm2(r);
        converged = rs_new <= target;
        double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < nvox; ++i) d[i] = r[i] + beta * d[i];
    }
    if (cg_converged) *cg_converged = converged;

    Object3D out(spec_);
    out.values = std::move(x);
    return out;
}

ReconReport ap_reconstruct(const MeasurementOperator& op, const std::vector<double>& b,
                           std::uint64_t init_seed, int max_iters,
                           const Object3D* ground_truth, const CgOptions& cg) {
    if (b.size() != op.measurement_size())
        throw std::invalid_argument("ap_reconstruct: data size mismatch");
    ReconReport report;
    Rng rng(init_seed);
    Object3D x(op.spec());
    for (cplx& v : x.values) v = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);

    std::vector<cplx> h = op.forward(x);
    auto residual_of = [&](const std::vector<cplx>& hh) {
        double acc = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            double d = b[i] - std::abs(hh[i]);
            acc += d * d;
        }
        return std::sqrt(acc);
    };

    std::vector<cplx> d(b.size());
    bool all_cg_ok = true;
    for (int it = 0; it < max_iters; ++it) {
        // P2: keep the phase, impose the measured magnitudes (sgn(0) := 1).
        for (std::size_t i = 0; i < b.size(); ++i) {
            double mag = std::abs(h[i]);
            d[i] = mag == 0.0 ? cplx(b[i]) : h[i] * (b[i] / mag);
        }
        bool cg_ok = true;
        x = op.pinv_apply(d, cg, &x, &cg_ok);
        all_cg_ok = all_cg_ok && cg_ok;
        if (op.flags().real_constraint)
            for (cplx& v : x.values) v = cplx(v.real(), 0.0);
        h = op.forward(x);
        report.residual_history.push_back(residual_of(h));
        if (ground_truth) report.correlation_history.push_back(correlation(x, *ground_truth));
        ++report.iterations;
    }
    report.final_object = std::move(x);
    report.cg_converged = all_cg_ok;
    return report;
}

Object3D vandermonde_tomography(
    const std::vector<std::pair<Direction, Projection2D>>& projections,
    const LatticeSpec& spec) {
    const int n = spec.n, p = spec.p;

    // Pick the first family holding at least n projections.
    std::vector<const std::pair<Direction, Projection2D>*> chosen;
    for (Family f : {Family::X, Family::Y, Family::Z}) {
        chosen.clear();
        for (const auto& entry : projections)
            if (entry.first.family == f) chosen.push_back(&entry);
        if (static_cast<int>(chosen.size()) >= n) break;
    }
    if (static_cast<int>(chosen.size()) < n)
        throw std::invalid_argument(
            "vandermonde_tomography: need at least n same-family projections");
    chosen.resize(n);
    const Family family = chosen.front()->first.family;

    TiltScheme subscheme;
    subscheme.epsilon = 1.0;
    for (const auto* entry : chosen) subscheme.directions.push_back(entry->first);
    DiversityReport report = diversity_check(subscheme, spec);
    if (!report.satisfied) throw DiversityError(report);

    // 2D spectra of the projections.
    std::vector<std::vector<cplx>> hat(n);
    for (int l = 0; l < n; ++l) {
        if (chosen[l]->second.spec.p != p)
            throw std::invalid_argument("vandermonde_tomography: projection size mismatch");
        hat[l] = dft2(chosen[l]->second);
    }

    // Solve the n x n system per 2D frequency; slabs[si] collects the partial
    // transform of axis-slice si over the transverse frequencies.
    std::vector<std::vector<cplx>> slabs(n, std::vector<cplx>(sq(p), cplx(0.0)));
    std::vector<double> nodes(n);
    std::vector<cplx> rhs(n);
    for (int k1 = range_lo(p); k1 <= range_hi(p); ++k1)
        for (int k2 = range_lo(p); k2 <= range_hi(p); ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const std::size_t fidx =
                static_cast<std::size_t>(wrap(k1, p)) * p + wrap(k2, p);
            for (int l = 0; l < n; ++l) {
                const Direction& d = chosen[l]->first;
                nodes[l] = -(d.alpha * k1 + d.beta * k2);
                rhs[l] = hat[l][fidx];
            }
            std::vector<cplx> coeffs = vandermonde_solve(nodes, rhs, spec);
            for (int si = 0; si < n; ++si) slabs[si][fidx] = coeffs[si];
        }

    // Per-slice DC is pinned by the zero-padding margin: each spatial slice
    // must vanish outside Z_n^2, so the missing constant is minus the mean
    // of the margin values.
    Object3D out(spec);
    const int h = range_hi(n), lo = range_lo(n);
    for (int si = 0; si < n; ++si) {
        ifft2(slabs[si].data(), p);
        double margin_count = 0.0;
        cplx margin_sum = 0.0;
        for (int a = range_lo(p); a <= range_hi(p); ++a)
            for (int b = range_lo(p); b <= range_hi(p); ++b) {
                if (a >= lo && a <= h && b >= lo && b <= h) continue;
                margin_sum += slabs[si][static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)];
                margin_count += 1.0;
            }
        const cplx dc = margin_count > 0.0 ? margin_sum / margin_count : cplx(0.0);
        const int s = lo + si;
        for (int a = lo; a <= h; ++a)
            for (int b = lo; b <= h; ++b) {
                cplx v =
                    slabs[si][static_cast<std::size_t>(wrap(a, p)) * p + wrap(b, p)] - dc;
                switch (family) {
                    case Family::X: out.at(s, a, b) = v; break;
                    case Family::Y: out.at(a, s, b) = v; break;
                    default: out.at(a, b, s) = v; break;
                }
            }
    }
    return out;
}

UnwrapResult unwrap_tilt_series(
    const std::vector<std::pair<Direction, Projection2D>>& wrapped, const TiltScheme& scheme,
    const LatticeSpec& spec, int max_outer_iters) {
    const int n = spec.n, p = spec.p;
    const std::size_t area = sq(p);
    const double period = 2.0 * pi / spec.kappa;
    const std::size_t m = wrapped.size();
    if (m == 0) throw std::invalid_argument("unwrap: empty input");

    TiltScheme graph_scheme;
    graph_scheme.epsilon = scheme.epsilon;
    for (const auto& entry : wrapped) graph_scheme.directions.push_back(entry.first);
    if (!is_epsilon_connected(graph_scheme))
        throw std::runtime_error("unwrap: tilt scheme is not epsilon-connected");

    // The tomography content needs a diverse family of at least n directions.
    std::vector<int> main_idx;
    for (Family f : {Family::X, Family::Y, Family::Z}) {
        main_idx.clear();
        for (std::size_t i = 0; i < m; ++i)
            if (wrapped[i].first.family == f) main_idx.push_back(static_cast<int>(i));
        if (static_cast<int>(main_idx.size()) >= n) break;
    }
    if (static_cast<int>(main_idx.size()) < n)
        throw std::invalid_argument("unwrap: no family with >= n directions");
    main_idx.resize(n);
    {
        TiltScheme main_scheme;
        main_scheme.epsilon = 1.0;
        for (int idx : main_idx) main_scheme.directions.push_back(wrapped[idx].first);
        DiversityReport report = diversity_check(main_scheme, spec);
        if (!report.satisfied) throw DiversityError(report);
    }

    // Pixelwise comparability of neighbouring projections only holds within a
    // family (the two image axes are the same lattice axes); split the
    // epsilon graph into same-family components.
    auto adj = epsilon_graph(graph_scheme);
    std::vector<int> comp(m, -1);
    std::vector<std::vector<int>> members;
    for (std::size_t root = 0; root < m; ++root) {
        if (comp[root] >= 0) continue;
        const int c = static_cast<int>(members.size());
        members.emplace_back();
        std::queue<int> bfs;
        bfs.push(static_cast<int>(root));
        comp[root] = c;
        while (!bfs.empty()) {
            int cur = bfs.front();
            bfs.pop();
            members[c].push_back(cur);
            for (int nb : adj[cur]) {
                if (comp[nb] >= 0 ||
                    wrapped[nb].first.family != wrapped[cur].first.family)
                    continue;
                comp[nb] = c;
                bfs.push(nb);
            }
        }
    }

    // Stage 1: within each component, propagate along a BFS spanning tree of
    // the same-family epsilon edges, snapping each child pixelwise to the
    // nearest value consistent with its parent. Afterwards every component
    // shares a single unknown per-pixel offset field.
    std::vector<std::vector<double>> u(m, std::vector<double>(area));
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t i = 0; i < area; ++i) u[t][i] = wrapped[t].second.values[i].real();
    {
        std::vector<char> seen(m, 0);
        for (const auto& group : members) {
            std::queue<int> frontier;
            frontier.push(group.front());
            seen[group.front()] = 1;
            while (!frontier.empty()) {
                int parent = frontier.front();
                frontier.pop();
                for (int child : adj[parent]) {
                    if (seen[child] || comp[child] != comp[parent]) continue;
                    seen[child] = 1;
                    for (std::size_t i = 0; i < area; ++i)
                        u[child][i] +=
                            period * std::round((u[parent][i] - u[child][i]) / period);
                    frontier.push(child);
                }
            }
        }
    }

    // Stage 2 seed: margin pixels expose each component's offset field. Rank
    // a component's members by how trustworthy their margins are: an
    // axis-aligned projection vanishes there identically, small fractional
    // slopes only leak interpolation tails.
    for (auto& group : members)
        std::sort(group.begin(), group.end(), [&](int a, int b) {
            const Direction &da = wrapped[a].first, &db = wrapped[b].first;
            const bool ea = da.alpha == 0.0 && da.beta == 0.0;
            const bool eb = db.alpha == 0.0 && db.beta == 0.0;
            if (ea != eb) return ea;
            return std::abs(da.alpha) + std::abs(da.beta) <
                   std::abs(db.alpha) + std::abs(db.beta);
        });
    const int ncomp = static_cast<int>(members.size());
    std::vector<std::vector<char>> interior(ncomp, std::vector<char>(area, 1));
    for (int c1 = range_lo(p); c1 <= range_hi(p); ++c1)
        for (int c2 = range_lo(p); c2 <= range_hi(p); ++c2) {
            const std::size_t px = static_cast<std::size_t>(wrap(c1, p)) * p + wrap(c2, p);
            for (int c = 0; c < ncomp; ++c)
                for (int t : members[c]) {
                    auto [la, lb] = support_bounds(wrapped[t].first, spec);
                    if (std::abs(c1) <= (la - 1) / 2 && std::abs(c2) <= (lb - 1) / 2)
                        continue;
                    double offset = period * std::round(u[t][px] / period);
                    if (offset != 0.0)
                        for (int tt : members[c]) u[tt][px] -= offset;
                    interior[c][px] = 0;
                    break;
                }
        }

    // Stage 2: within a component the pairwise differences of the candidates
    // are wrap-free, so the remaining unknowns are one offset field per
    // component, supported on its unseeded interior pixels. Solve the joint
    // linear least squares over (object, offset fields),
    //     min sum_t || P_t g + theta_{comp(t)} - u_t ||^2,
    // by conjugate gradient on the normal equations. The margin constraints
    // couple the components and leave only the one-voxel ambiguity at the
    // origin (an object shifted by a whole period at the origin voxel changes
    // every projection by a whole period at the central pixel only).
    const std::size_t nvox = static_cast<std::size_t>(n) * n * n;
    const std::size_t nvar = nvox + static_cast<std::size_t>(ncomp) * area;
    std::vector<cplx> x(nvar, cplx(0.0)), rhs(nvar), r(nvar), d(nvar), q(nvar);
    std::vector<cplx> img(area);
    auto apply_adjoint = [&](const std::vector<std::vector<double>>& data,
                             std::vector<cplx>& out_vec) {
        std::fill(out_vec.begin(), out_vec.end(), cplx(0.0));
        for (std::size_t t = 0; t < m; ++t) {
            for (std::size_t i = 0; i < area; ++i) img[i] = data[t][i];
            project_adjoint_raw(img.data(), spec, wrapped[t].first, out_vec.data());
            cplx* th = out_vec.data() + nvox + static_cast<std::size_t>(comp[t]) * area;
            const std::vector<char>& mask = interior[comp[t]];
            for (std::size_t i = 0; i < area; ++i)
                if (mask[i]) th[i] += data[t][i];
        }
    };
    auto gram = [&](const std::vector<cplx>& in, std::vector<cplx>& out_vec) {
        std::fill(out_vec.begin(), out_vec.end(), cplx(0.0));
        std::vector<cplx> row(area);
        for (std::size_t t = 0; t < m; ++t) {
            project_raw(in.data(), spec, wrapped[t].first, row.data());
            const cplx* th_in = in.data() + nvox + static_cast<std::size_t>(comp[t]) * area;
            const std::vector<char>& mask = interior[comp[t]];
            for (std::size_t i = 0; i < area; ++i)
                if (mask[i]) row[i] += th_in[i];
            project_adjoint_raw(row.data(), spec, wrapped[t].first, out_vec.data());
            cplx* th_out = out_vec.data() + nvox + static_cast<std::size_t>(comp[t]) * area;
            for (std::size_t i = 0; i < area; ++i)
                if (mask[i]) th_out[i] += row[i];
        }
    };
    apply_adjoint(u, rhs);
    r = rhs;
    d = r;
    double rs = norm2(r);
    const double target = 1e-22 * std::max(norm2(rhs), 1e-300);
    const int cg_cap = std::max(600, 12 * static_cast<int>(nvar) / 10);
    for (int it = 0; it < cg_cap && rs > target; ++it) {
        gram(d, q);
        double dq = dot_real(d, q);
        if (dq <= 0.0) break;
        double alpha = rs / dq;
        for (std::size_t i = 0; i < nvar; ++i) {
            x[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        double rs_new = norm2(r);
        double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < nvar; ++i) d[i] = r[i] + beta * d[i];
    }

    // Resolve the origin-voxel period ambiguity with the smoothness premise:
    // the object's variation between adjacent voxels is below half a period,
    // so a whole-period jump of the origin voxel against its neighbours marks
    // a spurious register.
    {
        Object3D probe(spec);
        std::copy(x.begin(), x.begin() + nvox, probe.values.begin());
        cplx nb = (probe.at(1, 0, 0) + probe.at(-1, 0, 0) + probe.at(0, 1, 0) +
                   probe.at(0, -1, 0) + probe.at(0, 0, 1) + probe.at(0, 0, -1)) /
                  6.0;
        double qshift = period * std::round((probe.at(0, 0, 0).real() - nb.real()) / period);
        if (qshift != 0.0) {
            x[probe.index(0, 0, 0)] -= qshift;
            const std::size_t center = 0;  // wrapped storage: pixel (0,0)
            for (int c = 0; c < ncomp; ++c) x[nvox + static_cast<std::size_t>(c) * area + center] += qshift;
        }
    }

    // Round the offset fields to whole periods and commit them, then polish
    // with a few reproject-and-snap sweeps against the object-only fit.
    for (int c = 0; c < ncomp; ++c)
        for (std::size_t i = 0; i < area; ++i) {
            if (!interior[c][i]) continue;
            double k = std::round(x[nvox + static_cast<std::size_t>(c) * area + i].real() / period);
            if (k != 0.0)
                for (int t : members[c]) u[t][i] -= period * k;
        }

    std::vector<cplx> g_vec(x.begin(), x.begin() + nvox);
    std::vector<cplx> grhs(nvox), gr(nvox), gd(nvox), gq(nvox);
    auto gram_obj = [&](const std::vector<cplx>& in, std::vector<cplx>& out_vec) {
        std::fill(out_vec.begin(), out_vec.end(), cplx(0.0));
        for (std::size_t t = 0; t < m; ++t) {
            project_raw(in.data(), spec, wrapped[t].first, img.data());
            project_adjoint_raw(img.data(), spec, wrapped[t].first, out_vec.data());
        }
    };
    auto solve_obj = [&]() {
        std::fill(grhs.begin(), grhs.end(), cplx(0.0));
        for (std::size_t t = 0; t < m; ++t) {
            for (std::size_t i = 0; i < area; ++i) img[i] = u[t][i];
            project_adjoint_raw(img.data(), spec, wrapped[t].first, grhs.data());
        }
        gram_obj(g_vec, gq);
        for (std::size_t i = 0; i < nvox; ++i) gr[i] = grhs[i] - gq[i];
        gd = gr;
        double grs = norm2(gr);
        const double gtarget = 1e-24 * std::max(norm2(grhs), 1e-300);
        for (int it = 0; it < 300 && grs > gtarget; ++it) {
            gram_obj(gd, gq);
            double dq2 = dot_real(gd, gq);
            if (dq2 <= 0.0) break;
            double alpha = grs / dq2;
            for (std::size_t i = 0; i < nvox; ++i) {
                g_vec[i] += alpha * gd[i];
                gr[i] -= alpha * gq[i];
            }
            double grs_new = norm2(gr);
            double beta = grs_new / grs;
            grs = grs_new;
            for (std::size_t i = 0; i < nvox; ++i) gd[i] = gr[i] + beta * gd[i];
        }
    };
    for (int outer = 0; outer < max_outer_iters; ++outer) {
        solve_obj();
        bool changed = false;
        for (std::size_t t = 0; t < m; ++t) {
            project_raw(g_vec.data(), spec, wrapped[t].first, img.data());
            for (std::size_t i = 0; i < area; ++i) {
                double k = std::round((u[t][i] - img[i].real()) / period);
                if (k != 0.0) {
                    u[t][i] -= period * k;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    solve_obj();
    UnwrapResult result;
    Object3D g(spec);
    g.values = g_vec;
    double err = 0.0, ref = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        Projection2D r_t = project(g, wrapped[t].first);
        for (std::size_t i = 0; i < area; ++i) {
            double dd = u[t][i] - r_t.values[i].real();
            err += dd * dd;
            ref += u[t][i] * u[t][i];
        }
    }
    result.residual = std::sqrt(err) / std::sqrt(std::max(ref, 1e-300));
    result.converged = result.residual < 1e-6;
    result.object = std::move(g);
    result.unwrapped.reserve(m);
    for (std::size_t t = 0; t < m; ++t) {
        Projection2D proj(spec, wrapped[t].first);
        for (std::size_t i = 0; i < area; ++i) proj.values[i] = u[t][i];
        result.unwrapped.emplace_back(wrapped[t].first, std::move(proj));
    }
    return result;
}

double correlation(const Object3D& f, const Object3D& f_star) {
    if (f.spec.n != f_star.spec.n)
        throw std::invalid_argument("correlation: spec mismatch");
    cplx inner = 0.0;
    double nf = 0.0, ng = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        inner += std::conj(f.values[i]) * f_star.values[i];
        nf += std::norm(f.values[i]);
        ng += std::norm(f_star.values[i]);
    }
    if (nf == 0.0 || ng == 0.0) return 0.0;
    return std::abs(inner) / std::sqrt(nf * ng);
}

double sector_bound(int n, double a, double b_angle, int S) {
    if (std::abs(b_angle - a) > pi)
        throw std::invalid_argument("sector_bound: sector must be convex (|b-a| <= pi)");
    if (S < 0) throw std::invalid_argument("sector_bound: S must be >= 0");
    double bound = 1.0 - static_cast<double>(n) * n *
                             std::pow(std::abs(b_angle - a) / (2.0 * pi), S / 2);
    return std::max(bound, 0.0);
}

}  // namespace difftomo
