"""Closed-form calculus of Gaussian profiles a * exp(-(x - mu)^2 / (4 tau)).

The width ``tau`` is the heat-flow time, so convolving heat kernels adds
widths.  Amplitudes are carried as logarithms; ``Gaussian.a`` may
underflow for extreme powers but norms computed through
:func:`log_lp_norm` do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import extremal_beta
from .errors import DivergentConvolution, DomainError, LimitOnlyExtremizer, NonNormable
from .exponents import ExponentLike, Exponent

LOG_2SQRTPI = math.log(2.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class Gaussian:
    log_a: float
    mu: float
    tau: float

    def __post_init__(self):
        if self.tau == 0 or not math.isfinite(self.tau):
            raise DomainError(f"Gaussian width must be finite and nonzero, got {self.tau}")
        if not (math.isfinite(self.log_a) and math.isfinite(self.mu)):
            raise DomainError("Gaussian amplitude and center must be finite")

    @classmethod
    def from_amplitude(cls, a: float, mu: float = 0.0, tau: float = 1.0) -> "Gaussian":
        if not a > 0:
            raise DomainError(f"Gaussian amplitude must be > 0, got {a}")
        return cls(math.log(a), float(mu), float(tau))

    @property
    def a(self) -> float:
        return math.exp(self.log_a)

    @property
    def normable(self) -> bool:
        return self.tau > 0

    def integral(self) -> float:
        if self.tau < 0:
            raise NonNormable("growing Gaussian is not integrable")
        return self.a * 2.0 * math.sqrt(math.pi * self.tau)

    def __call__(self, x):
        return evaluate(self, x)

    def to_dict(self) -> dict:
        return {"kind": "gaussian", "a": self.a, "mu": self.mu, "tau": self.tau}


def heat_kernel(t: float) -> Gaussian:
    if not t > 0:
        raise DomainError(f"heat kernel needs t > 0, got {t}")
    return Gaussian(-LOG_2SQRTPI - 0.5 * math.log(t), 0.0, float(t))


def convolve(g1: Gaussian, g2: Gaussian) -> Gaussian:
    """Exact convolution; defined whenever 1/tau1 + 1/tau2 > 0."""
    if not (1.0 / g1.tau + 1.0 / g2.tau) > 0:
        raise DivergentConvolution(
            f"1/tau1 + 1/tau2 = {1.0 / g1.tau + 1.0 / g2.tau:.6g} <= 0; the integral diverges"
        )
    tau = g1.tau + g2.tau
    # tau1*tau2/(tau1+tau2) > 0 follows from the precondition
    log_a = g1.log_a + g2.log_a + LOG_2SQRTPI + 0.5 * math.log(g1.tau * g2.tau / tau)
    return Gaussian(log_a, g1.mu + g2.mu, tau)


def power(g: Gaussian, beta: float) -> Gaussian:
    if not beta > 0 or math.isinf(beta):
        raise DomainError(f"power needs finite beta > 0, got {beta}")
    return Gaussian(beta * g.log_a, g.mu, g.tau / beta)


def log_lp_norm(g: Gaussian, p: ExponentLike) -> float:
    p = Exponent.of(p)
    if g.tau < 0:
        raise NonNormable(f"Gaussian with tau = {g.tau} < 0 has no finite L^{p} norm")
    b = float(p.recip)
    if b == 0:
        return g.log_a
    return g.log_a + 0.5 * b * math.log(4.0 * math.pi * g.tau * b)


def lp_norm(g: Gaussian, p: ExponentLike) -> float:
    """a * (4 pi tau / p)^(1/(2p)); the amplitude itself when p = inf."""
    return math.exp(log_lp_norm(g, p))


def evaluate(g: Gaussian, x):
    x = np.asarray(x, dtype=float)
    out = np.exp(g.log_a - (x - g.mu) ** 2 / (4.0 * g.tau))
    return float(out) if out.ndim == 0 else out


def extremal_input(p: ExponentLike, q: ExponentLike, t: float) -> Gaussian:
    """heat_kernel(t) ** beta with the extremal beta for (p, q)."""
    beta = extremal_beta(p, q)
    if not isinstance(beta, float) or beta in (0.0, math.inf):
        raise LimitOnlyExtremizer(
            f"extremal beta for (p, q) = ({Exponent.of(p)}, {Exponent.of(q)}) is {beta}; "
            "equality is only approached along a sequence of powers"
        )
    return power(heat_kernel(t), beta)
