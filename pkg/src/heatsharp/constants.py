"""Sharp constants for the L^p -> L^r heat-flow estimate.

All powers are evaluated as exponentials of ``x log x`` terms in
reciprocal space, with the convention ``0 log 0 = 0`` so that the
endpoint exponents 1 and infinity need no special branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError
from .exponents import ExponentLike, Exponent, YoungTriple, young_r

LOG_TWO_SQRT_PI = math.log(2.0 * math.sqrt(math.pi))


class _Indeterminate:
    """Marker for the p = q = 1 case, where every beta > 0 attains equality."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INDETERMINATE"

    def __str__(self):
        return "indeterminate"


INDETERMINATE = _Indeterminate()

Beta = Union[float, _Indeterminate]


def xlogx(a: float) -> float:
    return 0.0 if a == 0 else a * math.log(a)


def log_c_constant(p: ExponentLike) -> float:
    a = float(Exponent.of(p).recip)
    return xlogx(1.0 - a) - xlogx(a)


def c_constant(p: ExponentLike) -> float:
    """p^(1/p) / p'^(1/p'), with c_1 = c_inf = 1."""
    return math.exp(log_c_constant(p))


def log_alpha(q: ExponentLike) -> float:
    b = float(Exponent.of(q).recip)
    return -(1.0 - b) * LOG_TWO_SQRT_PI + 0.5 * xlogx(b)


def alpha(q: ExponentLike) -> float:
    """L^q norm of the unit-time heat kernel."""
    q = Exponent.of(q)
    if q.recip == 1:
        return 1.0
    return math.exp(log_alpha(q))


def sharp_young_constant(p: ExponentLike, q: ExponentLike) -> float:
    tr = young_r(p, q)
    return math.exp(0.5 * (log_c_constant(tr.p) + log_c_constant(tr.q) - log_c_constant(tr.r)))


def heat_estimate_constant(p: ExponentLike, q: ExponentLike) -> float:
    """K_{p,q}: the best constant in ||f * heat_t||_r <= K ||f||_p t^(-decay)."""
    return sharp_young_constant(p, q) * alpha(q)


def decay_exponent(q: ExponentLike) -> float:
    return (1.0 - float(Exponent.of(q).recip)) / 2.0


def extremal_beta(p: ExponentLike, q: ExponentLike) -> Beta:
    """Power of the heat kernel that attains equality.

    Returns ``math.inf`` when p = 1, ``0.0`` when q = 1 (both limits, not
    attained) and :data:`INDETERMINATE` when p = q = 1.
    """
    tr = young_r(p, q)
    if tr.p.recip == 1 and tr.q.recip == 1:
        return INDETERMINATE
    if tr.p.recip == 1:
        return math.inf
    if tr.q.recip == 1:
        return 0.0
    return float((1 - tr.q.recip) / (1 - tr.p.recip))


def _product_form_log(tr: YoungTriple) -> float:
    ap, aq, ar = (1.0 - float(e.recip) for e in (tr.p, tr.q, tr.r))
    return xlogx(ap) + xlogx(aq) - xlogx(ar)


def equality_residual(beta: float, triple: YoungTriple) -> float:
    """LHS - RHS of the equation whose positive root is the extremal beta."""
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if math.isinf(beta):
        raise DomainError("beta must be finite")
    if not (1 > triple.p.recip > 0 and 1 > triple.q.recip > 0):
        raise DomainError("equality_residual needs p, q strictly between 1 and inf")
    A = 1.0 - float(triple.q.recip)
    B = 1.0 - float(triple.r.recip)
    lhs = math.exp(A * math.log(beta) - B * math.log1p(beta))
    return lhs - math.exp(_product_form_log(triple))


def rhs_identity_check(triple: YoungTriple) -> float:
    """|(c_p c_q / c_r)(a_p a_q / a_r)^2 - product form|; should vanish."""
    tr = triple
    log_lhs = (
        log_c_constant(tr.p) + log_c_constant(tr.q) - log_c_constant(tr.r)
        + 2.0 * (log_alpha(tr.p) + log_alpha(tr.q) - log_alpha(tr.r))
    )
    return abs(math.exp(log_lhs) - math.exp(_product_form_log(tr)))


def g_profile(A: float, B: float, x: float) -> float:
    if not x > 0:
        raise DomainError(f"g_profile needs x > 0, got {x}")
    return math.exp(A * math.log(x) - B * math.log1p(x))


def g_argmax(A: float, B: float) -> float:
    if not B > A > 0:
        raise DomainError(f"g has no interior maximum unless B > A > 0 (A={A}, B={B})")
    return A / (B - A)


def sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def beta_scan(beta_star: float, n: int = 401, span: float = 100.0) -> list:
    """Log-spaced betas over [beta*/span, span*beta*]."""
    lo, hi = math.log(beta_star / span), math.log(beta_star * span)
    return [math.exp(lo + (hi - lo) * k / (n - 1)) for k in range(n)]


def residual_sign_changes(triple: YoungTriple, beta_star: float, n: int = 401, span: float = 100.0) -> int:
    """Sign changes of the residual itself along :func:`beta_scan`."""
    return sign_changes(equality_residual(b, triple) for b in beta_scan(beta_star, n, span))


def residual_turning_points(triple: YoungTriple, beta_star: float, n: int = 400, span: float = 100.0) -> int:
    """Sign changes of the residual's forward differences along :func:`beta_scan`.

    The residual is g(beta) - max g, so it rises to zero at beta* and falls
    afterwards; a unique root shows up as exactly one turning point.
    """
    vals = [equality_residual(b, triple) for b in beta_scan(beta_star, n, span)]
    return sign_changes(b - a for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class SharpConstants:
    triple: YoungTriple
    c_p: float
    c_q: float
    c_r: float
    alpha_q: float
    C: float
    K: float
    beta: Beta
    decay: float

    @property
    def beta_limit_only(self) -> bool:
        """True when the extremizer exists only as a limit (beta = 0 or inf)."""
        return self.beta is INDETERMINATE or self.beta in (0.0, math.inf)

    def to_dict(self) -> dict:
        beta = self.beta
        if beta is INDETERMINATE:
            beta = "indeterminate"
        return {
            **self.triple.as_strings(),
            "c_p": self.c_p,
            "c_q": self.c_q,
            "c_r": self.c_r,
            "alpha_q": self.alpha_q,
            "C": self.C,
            "K": self.K,
            "beta": beta,
            "beta_limit_only": self.beta_limit_only,
            "decay": self.decay,
        }


def sharp_constants(p: ExponentLike, q: ExponentLike) -> SharpConstants:
    tr = young_r(p, q)
    C = sharp_young_constant(tr.p, tr.q)
    a_q = alpha(tr.q)
    return SharpConstants(
        triple=tr,
        c_p=c_constant(tr.p),
        c_q=c_constant(tr.q),
        c_r=c_constant(tr.r),
        alpha_q=a_q,
        C=C,
        K=C * a_q,
        beta=extremal_beta(tr.p, tr.q),
        decay=decay_exponent(tr.q),
    )
