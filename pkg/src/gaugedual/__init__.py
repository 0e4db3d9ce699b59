"""Gauge duality toolkit: gauges and their polars, antipolar set calculus,
gauge and Lagrange duals, subgradient solvers and value-function sensitivity.
"""

from .antipolar import antipolar, biantipolar_check, recession_identity_check
from .cones import FreeSpace, NonnegOrthant, PolyhedralCone, PsdCone, ZeroCone
from .duality import (
    DualityCertificate,
    DualProblem,
    GaugeProblem,
    build_bidual,
    build_gauge_dual,
    build_lagrange_dual,
    certify,
    map_dual_solutions,
)
from .gauges import Atomic, Composed, ConicLinear, Gauge, Lovasz, Norm, Sum, Support, polar_gauge
from .linalg import LinearMap, gen_eigmax, jacobi_eigen, solve_lp
from .sensitivity import ValueFunctionProbe, check_subgradient_inequality, value_function, value_subgradient
from .solvers import SubgradConfig, solve_gauge_dual, solve_lagrange_dual, solve_primal_oracle

__version__ = "0.1.0"
