"""Exact formal-distribution calculus over Q(v) and checks of the singular
R-matrix identities."""

from .distributions import Distribution, TruncParams, compare, dist_mul, flatten
from .qfunctions import build_f, build_gtilde, verify_fdiff
from .ratfun import Frame, Monomial, RatFun
from .rmatrix import DistMatrix, build_R, build_Rinv, check_inverse, check_ybe
from .scalars import QScalar

__all__ = [
    "QScalar",
    "RatFun",
    "Monomial",
    "Frame",
    "Distribution",
    "TruncParams",
    "compare",
    "dist_mul",
    "flatten",
    "build_f",
    "build_gtilde",
    "verify_fdiff",
    "DistMatrix",
    "build_R",
    "build_Rinv",
    "check_inverse",
    "check_ybe",
]
__version__ = "0.1.0"
