"""Discrete tomographic phase retrieval: python surface over the C++ core."""

from _difftomo import (
    DiffractionPattern,
    Direction,
    DiversityError,
    DiversityReport,
    Family,
    LatticeSpec,
    MeasurementOperator,
    Object3D,
    PhaseMask,
    Projection2D,
    ReconReport,
    TiltScheme,
    UnwrapResult,
    ap_reconstruct,
    builtin_phantom,
    conical_tilt_scheme,
    correlation,
    diffraction_pattern,
    dirichlet_kernel,
    diversity_check,
    dual_axis_scheme,
    hybrid_projection,
    interpolate,
    is_epsilon_connected,
    nsr,
    phase_projection,
    poissonize,
    project,
    random_phase_mask,
    scheme_polyline_length,
    sector_bound,
    solve_s_for_nsr,
    support_bounds,
    tset_scheme,
    unwrap_tilt_series,
    vandermonde_tomography,
    verify_slice_theorem,
)

__all__ = [name for name in dir() if not name.startswith("_")]
