"""Exact and numeric checks for simultaneous Waring decompositions of pairs of ternary forms."""

from .bundle import BundlePoint, chow_degree, chow_reduce, is_defective, secant_dimension
from .classifier import CaseReport, classify, is_perfect, perfect_cases_upto
from .decompose import Decomposition, fiber_sample, newton_solve, simultaneous_diagonalize, verify_decomposition
from .forms import FormPair, TernaryForm, evaluate, gradient, monomial_basis, power_of_linear
from .interpolation import (
    ConditionScheme,
    SplitReport,
    ah_expected_dim,
    castelnuovo_split,
    plane_system_dim,
    taut_system_dim,
)
from .linalg import DEFAULT_PRIME, ScalarDomain, kernel_basis, rank, solve_linear

__version__ = "0.1.0"
