"""Cauchy biorthogonal and multilevel Hermite-Padé polynomials at arbitrary precision.

The package builds the polynomials for two measures on disjoint real
intervals, computes the limit objects (equilibrium measures, comparison
functions, Szegő functions and the fixed point of the boundary-law
operator T) and measures how fast the polynomials approach them.
"""

from .biortho import biorthogonal_pair, hp_system, hp_system_b, tilde_T_n
from .errors import (
    CbopError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericalError,
    PrecisionError,
    SzegoConditionError,
)
from .fixedpoint import contraction_audit, fixed_point_G, make_T, operator_T, theoretical_limits
from .harness import ConvergenceReport, Scenario, bundled_suites, run_suite
from .measures import MeasurePair, chebyshev, custom, jacobi, lebesgue, nikishin
from .numkit import Interval, PrecisionConfig
from .orthopoly import gram_solve, multipoint_pade, varying_op
from .potential import comparison_functions, conformal_branches, vector_equilibrium, weighted_equilibrium
from .szego import szego_from_h, szego_from_measure, szego_from_values

__version__ = "0.1.0"

__all__ = [
    "CbopError", "ConfigError", "ConvergenceError", "ConvergenceReport", "DomainError", "Interval",
    "MeasurePair", "NumericalError", "PrecisionConfig", "PrecisionError", "Scenario", "SzegoConditionError",
    "biorthogonal_pair", "bundled_suites", "chebyshev", "comparison_functions", "conformal_branches",
    "contraction_audit", "custom", "fixed_point_G", "gram_solve", "hp_system", "hp_system_b", "jacobi",
    "lebesgue", "make_T", "multipoint_pade", "nikishin", "operator_T", "run_suite", "szego_from_h",
    "szego_from_measure", "szego_from_values", "theoretical_limits", "tilde_T_n", "varying_op",
    "vector_equilibrium", "weighted_equilibrium",
]
