#pragma once

#include <cstdint>
#include <optional>

#include "difftomo/measurement.hpp"
#include "difftomo/spectral.hpp"
#include "difftomo/tilt.hpp"

namespace difftomo {

struct OperatorFlags {
    bool oversampled = false;
    bool real_constraint = false;
};

struct CgOptions {
    double tol = 1e-10;
    int max_iters = 200;
};

// Stacked measurement map f -> (DFT(mask . project(f, t)))_t. The mask/DFT
// stage is unitary up to scale, so the pseudo-inverse reduces to a CG solve
// on the ray-transform normal equations.
class MeasurementOperator {
  public:
    MeasurementOperator(const TiltScheme& scheme, std::optional<PhaseMask> mask,
                        const LatticeSpec& spec, OperatorFlags flags);

    const LatticeSpec& spec() const { return spec_; }
    const TiltScheme& scheme() const { return scheme_; }
    const OperatorFlags& flags() const { return flags_; }
    int pattern_side() const { return flags_.oversampled ? 2 * spec_.p - 1 : spec_.p; }
    std::size_t measurement_size() const {
        return scheme_.directions.size() * static_cast<std::size_t>(pattern_side()) *
               pattern_side();
    }

    std::vector<cplx> forward(const Object3D& f) const;
    Object3D adjoint(const std::vector<cplx>& y) const;

    // Least-squares pseudo-inverse application A^dagger y; warm start reuses
    // the caller's previous solution. cg_converged reports the inner solve.
    Object3D pinv_apply(const std::vector<cplx>& y, const CgOptions& opts,
                        const Object3D* warm_start = nullptr,
                        bool* cg_converged = nullptr) const;

    // Ray-transform stack and its adjoint on raw buffers (no mask/DFT stage).
    void rays_forward(const cplx* obj, cplx* out) const;
    void rays_adjoint(const cplx* stack, cplx* obj) const;

  private:
    TiltScheme scheme_;
    std::optional<PhaseMask> mask_;
    LatticeSpec spec_;
    OperatorFlags flags_;
    // Directions grouped by family for shared slice FFTs.
    std::array<std::vector<int>, 3> by_family_;
};

MeasurementOperator build_forward(const TiltScheme& scheme, std::optional<PhaseMask> mask,
                                  const LatticeSpec& spec, OperatorFlags flags);

struct ReconReport {
    int iterations = 0;
    std::vector<double> residual_history;
    std::vector<double> correlation_history;  // empty without ground truth
    Object3D final_object;
    bool cg_converged = true;
};

// Alternating projection h <- P1(P2(h)) between the range of the operator
// and the magnitude constraint |h| = b, from a white-noise start.
ReconReport ap_reconstruct(const MeasurementOperator& op, const std::vector<double>& b,
                           std::uint64_t init_seed, int max_iters,
                           const Object3D* ground_truth = nullptr,
                           const CgOptions& cg = CgOptions{});

struct DiversityError : std::runtime_error {
    DiversityReport report;
    explicit DiversityError(const DiversityReport& r)
        : std::runtime_error("vandermonde_tomography: diversity condition not satisfied"),
          report(r) {}
};

// Exact linear tomography from n same-family projections: per 2D frequency a
// progressive Vandermonde solve recovers the partial transform along the
// family axis, the zero-padding margin pins the per-slice DC term.
Object3D vandermonde_tomography(const std::vector<std::pair<Direction, Projection2D>>& projections,
                                const LatticeSpec& spec);

struct UnwrapResult {
    std::vector<std::pair<Direction, Projection2D>> unwrapped;
    Object3D object;
    bool converged = false;
    double residual = 0.0;  // relative reprojection residual
};

// Two-stage tilt-series unwrapping: spanning-tree propagation across the
// epsilon graph, then shared per-pixel offset refinement against the
// tomographic reconstruction, seeded by the guaranteed-zero support margin.
UnwrapResult unwrap_tilt_series(const std::vector<std::pair<Direction, Projection2D>>& wrapped,
                                const TiltScheme& scheme, const LatticeSpec& spec,
                                int max_outer_iters = 50);

// |<conj(f), f*>| / (|f| |f*|); 0 when either norm vanishes.
double correlation(const Object3D& f, const Object3D& f_star);

// Probability bound 1 - n^2 |(b-a)/(2 pi)|^{floor(S/2)}, clamped at 0;
// requires a convex sector |b - a| <= pi.
double sector_bound(int n, double a, double b_angle, int S);

}  // namespace difftomo
