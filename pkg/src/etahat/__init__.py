"""Intrinsic second-kind bidifferentials on compact Riemann surfaces.

Numerical construction of the Hodge-normalized bidifferential on C x C for
genus-1 tori and odd-degree hyperelliptic curves, the projective structure
read off its diagonal jet, and the genus-1 variation over moduli.
"""

from etahat.curves import Curve, SurfacePoint, make_curve
from etahat.kernels import Kernel, base_kernel, a_normalize, hodge_correct
from etahat.periods import PeriodData, period_matrices

__all__ = [
    "Curve",
    "SurfacePoint",
    "make_curve",
    "Kernel",
    "base_kernel",
    "a_normalize",
    "hodge_correct",
    "PeriodData",
    "period_matrices",
]

__version__ = "0.1.0"
