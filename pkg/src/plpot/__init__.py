"""Weighted polynomial extremal functions and indicator-class regularization.

The package computes scaled sup-norm extremal polynomials over convex
lattice bodies, evaluates the associated logarithmic indicator, and
stress-tests two regularization procedures (kernel smoothing and
inf-convolution) against the class constraints that only lower-set
bodies preserve under smoothing.
"""

from .convex_body import (
    ConvexBody,
    body_from_dict,
    body_to_dict,
    build_body,
    check_sigma_in_kp,
    contains,
    deg_p,
    dilate,
    is_lower_set,
    lattice_points,
    non_lower_quadrilateral,
    support_value,
    unit_box,
    unit_simplex,
)
from .errors import (
    ConfigError,
    ConstantPolynomial,
    ContractViolation,
    DegenerateBody,
    EmptyEffectiveSample,
    NegativeCoordinate,
    NonFiniteSample,
    NotMonotone,
    PlpotError,
    QuadratureTooCoarse,
    SolverFailure,
    SolverStall,
    ToleranceExceeded,
    ToleranceFailure,
    Unbounded,
    UnboundedLevelSet,
    UnknownGenerator,
    Unreachable,
)
from .grids import Axis, GridField, GridSpec
from .indicator import (
    LogPoint,
    check_lower_bound,
    h_p,
    h_p_on_logs,
    level_set_distance,
    make_h_function,
)
from .poly_extremal import (
    ExtremalEstimate,
    ExtremalSolver,
    PolyCoeffs,
    check_submultiplicative,
    eval_poly,
    lelong_plus_envelope,
    make_poly,
    monotone_weight_limit,
    phi_n,
    v_estimate_grid,
    weighted_sup_norm,
)
from .regularize import (
    ConvolveResult,
    CounterexampleReport,
    FerrierResult,
    Kernel,
    a_delta_bound,
    build_kernel,
    convolution_gap_scan,
    convolve,
    counterexample_point,
    distance_identity_check,
    ferrier,
    ferrier_contracts,
    hat_delta,
    submean_check,
    usable_t_estimate,
)
from .sets import (
    SampledWeightedSet,
    chebyshev_interval_set,
    from_config,
    point_list_set,
    torus_set,
    unit_circle_set,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "ConfigError",
    "ConstantPolynomial",
    "ContractViolation",
    "ConvexBody",
    "ConvolveResult",
    "CounterexampleReport",
    "DegenerateBody",
    "EmptyEffectiveSample",
    "ExtremalEstimate",
    "ExtremalSolver",
    "FerrierResult",
    "GridField",
    "GridSpec",
    "Kernel",
    "LogPoint",
    "NegativeCoordinate",
    "NonFiniteSample",
    "NotMonotone",
    "PlpotError",
    "PolyCoeffs",
    "QuadratureTooCoarse",
    "SampledWeightedSet",
    "SolverFailure",
    "SolverStall",
    "ToleranceExceeded",
    "ToleranceFailure",
    "Unbounded",
    "UnboundedLevelSet",
    "UnknownGenerator",
    "Unreachable",
    "a_delta_bound",
    "body_from_dict",
    "body_to_dict",
    "build_body",
    "build_kernel",
    "chebyshev_interval_set",
    "check_lower_bound",
    "check_sigma_in_kp",
    "check_submultiplicative",
    "contains",
    "convolution_gap_scan",
    "convolve",
    "counterexample_point",
    "deg_p",
    "dilate",
    "distance_identity_check",
    "eval_poly",
    "ferrier",
    "ferrier_contracts",
    "from_config",
    "h_p",
    "h_p_on_logs",
    "hat_delta",
    "is_lower_set",
    "lattice_points",
    "lelong_plus_envelope",
    "level_set_distance",
    "make_h_function",
    "make_poly",
    "monotone_weight_limit",
    "non_lower_quadrilateral",
    "phi_n",
    "point_list_set",
    "submean_check",
    "support_value",
    "torus_set",
    "unit_box",
    "unit_circle_set",
    "unit_simplex",
    "usable_t_estimate",
    "v_estimate_grid",
    "weighted_sup_norm",
]
