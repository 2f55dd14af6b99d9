"""Numerical lab for Mellin coefficients, Berezin transforms and boundary
means of bounded radial symbols on the Bergman space of the disc."""

__version__ = "0.1.0"

from .berezin import (
    QuasihomogeneousSymbol,
    berezin_integral_oracle,
    berezin_quasihomogeneous,
    berezin_radial,
    convex_decomposition,
)
from .cluster import (
    ChainConfig,
    boundary_mean,
    cluster_estimate,
    density_arc_count,
    density_ratio,
    extreme_point_membership_check,
    verify_chain,
)
from .coefficients import coefficient_table, mellin_coefficient, toeplitz_eigenvalue_sequence
from .numerics import integrate, sum_weighted_coefficients
from .symbols import (
    Affine,
    Constant,
    GrudskyVasilevski,
    PiecewiseConstant,
    Power,
    RealPart,
    StepExample10,
    compute_alpha,
    essential_range_extreme_points,
    evaluate,
    sup_modulus,
)

__all__ = [
    "Affine",
    "ChainConfig",
    "Constant",
    "GrudskyVasilevski",
    "PiecewiseConstant",
    "Power",
    "QuasihomogeneousSymbol",
    "RealPart",
    "StepExample10",
    "berezin_integral_oracle",
    "berezin_quasihomogeneous",
    "berezin_radial",
    "boundary_mean",
    "cluster_estimate",
    "coefficient_table",
    "compute_alpha",
    "convex_decomposition",
    "density_arc_count",
    "density_ratio",
    "essential_range_extreme_points",
    "evaluate",
    "extreme_point_membership_check",
    "integrate",
    "mellin_coefficient",
    "sum_weighted_coefficients",
    "sup_modulus",
    "toeplitz_eigenvalue_sequence",
    "verify_chain",
]
