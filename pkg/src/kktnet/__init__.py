"""KKT-based necessary optimality conditions for shallow network approximation
under uniform (Chebyshev) and Manhattan (l1) loss."""

from .deviation import DeviationProfile, LossMode, PointClassification, classify, compute_residuals
from .kkt import (
    Multipliers,
    OptimalityVerdict,
    Status,
    assemble_kkt_residual,
    check,
    check_manhattan,
    check_uniform,
    generator,
    generators,
    multipliers_from_witness,
)
from .model import (
    SIGMOID,
    SOFTPLUS,
    TANH,
    Activation,
    Dataset,
    NoHidden,
    OneHidden,
    Unit,
    evaluate,
    get_activation,
    network_eval,
    network_param_gradient,
)
from .polytope import hull_intersect, lp_phase1_feasible, separating_hyperplane, zonotope_contains
from .solver import bisect_uniform_no_hidden, brute_force_oracle, grad_check, subgradient_descent

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "assemble_kkt_residual",
    "bisect_uniform_no_hidden",
    "brute_force_oracle",
    "check",
    "check_manhattan",
    "check_uniform",
    "classify",
    "compute_residuals",
    "Dataset",
    "DeviationProfile",
    "evaluate",
    "generator",
    "generators",
    "get_activation",
    "grad_check",
    "hull_intersect",
    "LossMode",
    "lp_phase1_feasible",
    "Multipliers",
    "multipliers_from_witness",
    "network_eval",
    "network_param_gradient",
    "NoHidden",
    "OneHidden",
    "OptimalityVerdict",
    "PointClassification",
    "separating_hyperplane",
    "SIGMOID",
    "SOFTPLUS",
    "Status",
    "subgradient_descent",
    "TANH",
    "Unit",
    "zonotope_contains",
]
