"""Sharp L^p estimates for the one-dimensional heat equation.

Closed-form Gaussian calculus (:mod:`heatsharp.gaussian`) is checked
against grid quadrature (:mod:`heatsharp.gridfn`); :mod:`heatsharp.experiments`
builds records from both and :mod:`heatsharp.selftest` holds the
acceptance matrix.
"""

from .constants import (
    INDETERMINATE,
    alpha,
    c_constant,
    decay_exponent,
    extremal_beta,
    heat_estimate_constant,
    sharp_constants,
    sharp_young_constant,
)
from .errors import (
    DivergentConvolution,
    DomainError,
    HeatSharpError,
    InvalidTriple,
    LimitOnlyExtremizer,
    NonNormable,
    TruncationWarning,
)
from .exponents import INF, ONE, Exponent, YoungTriple, conjugate, young_r
from .gaussian import Gaussian, convolve, extremal_input, heat_kernel, lp_norm, power

__version__ = "0.1.0"

__all__ = [
    "INDETERMINATE", "alpha", "c_constant", "decay_exponent", "extremal_beta",
    "heat_estimate_constant", "sharp_constants", "sharp_young_constant",
    "DivergentConvolution", "DomainError", "HeatSharpError", "InvalidTriple",
    "LimitOnlyExtremizer", "NonNormable", "TruncationWarning",
    "INF", "ONE", "Exponent", "YoungTriple", "conjugate", "young_r",
    "Gaussian", "convolve", "extremal_input", "heat_kernel", "lp_norm", "power",
]
