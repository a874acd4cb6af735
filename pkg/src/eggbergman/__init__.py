"""Weighted Bergman kernels, the Gleason decomposition and their numerical
verification on the egg domains |z|^2 + |w|^(2/a) < 1."""

from .analysis import (
    ExponentChoice,
    RegimeError,
    SpaceParams,
    SupEstimate,
    choose_exponents,
    l1_check,
    lemma1_scan,
    lemma2_scan,
    lp_norm,
    operator_norm_estimate,
    projection_apply,
    q_kernel,
    schur_test,
    symmetry_check,
)
from .domain import CPoint, DomainError, EggDomain, contains, defining_function, kernel_denominator, pairing
from .gamma_tools import Ineq56Params, gamma_ratio, ineq5_ratio, ineq6_ratio, log_gamma, sup_constant
from .kernel import (
    KernelParams,
    bergman_kernel,
    g_sigma,
    kernel_gradient,
    lemma1_ratio,
    lemma2_ratio,
    lemma2_series,
    solve_kernel_coefficients,
)
from .quadrature import (
    MCResult,
    WeightedMeasure,
    integrate_weighted,
    psi_norm_integral,
    weighted_volume,
)
from .report import VerificationReport
from .sampling import SamplerSpec, sample_uniform, sample_weighted
from .taylor import (
    TaylorPoly,
    evaluate,
    gleason_decompose,
    leibenson_component,
    multiplier_transform,
    partial_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentChoice",
    "RegimeError",
    "SpaceParams",
    "SupEstimate",
    "choose_exponents",
    "l1_check",
    "lemma1_scan",
    "lemma2_scan",
    "lp_norm",
    "operator_norm_estimate",
    "projection_apply",
    "q_kernel",
    "schur_test",
    "symmetry_check",
    "KernelParams",
    "bergman_kernel",
    "g_sigma",
    "kernel_gradient",
    "lemma1_ratio",
    "lemma2_ratio",
    "lemma2_series",
    "solve_kernel_coefficients",
    "MCResult",
    "WeightedMeasure",
    "integrate_weighted",
    "psi_norm_integral",
    "weighted_volume",
    "TaylorPoly",
    "evaluate",
    "gleason_decompose",
    "leibenson_component",
    "multiplier_transform",
    "partial_derivative",
    "CPoint",
    "DomainError",
    "EggDomain",
    "contains",
    "defining_function",
    "kernel_denominator",
    "pairing",
    "Ineq56Params",
    "gamma_ratio",
    "ineq5_ratio",
    "ineq6_ratio",
    "log_gamma",
    "sup_constant",
    "VerificationReport",
    "SamplerSpec",
    "sample_uniform",
    "sample_weighted",
]
