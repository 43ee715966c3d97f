"""Localized summability kernels on the sphere built from Newtonian point charges."""

from .coefficients import QSystemSolution, S1CoefficientSet, ballot, s1_coefficients, solve_q
from .kernels import (ExpansionSpec, Family, KernelParams, PointChargeConfig, ZonalKernel,
                      eval_point_charges, expansion_eval, expansion_spec, invert_poles,
                      make_kernel, to_point_charges)
from .quadrature import flat_integral, normalize_kernel, zonal_integral
from .special_fn import DomainError, PolyRational
from .verify import CheckReport, run_suite

__all__ = [
    "CheckReport", "DomainError", "ExpansionSpec", "Family", "KernelParams",
    "PointChargeConfig", "PolyRational", "QSystemSolution", "S1CoefficientSet", "ZonalKernel",
    "ballot", "eval_point_charges", "expansion_eval", "expansion_spec", "flat_integral",
    "invert_poles", "make_kernel", "normalize_kernel", "run_suite", "s1_coefficients",
    "solve_q", "to_point_charges", "zonal_integral",
]
