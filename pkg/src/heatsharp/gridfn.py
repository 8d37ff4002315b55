"""Sampled functions, heat flow by quadrature, and grid L^p norms.

This is the numerical counterpart of :mod:`heatsharp.gaussian`: nothing
here uses the closed-form convolution or norm formulas, so agreement
between the two is a genuine cross-check.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.signal import fftconvolve

from . import gaussian as gs
from .errors import DomainError, TruncationWarning
from .exponents import ExponentLike, Exponent

# smallest m with exp(-m^2/4) < 1e-16
KERNEL_RADIUS_FACTOR = 2.0 * math.sqrt(16.0 * math.log(10.0)) + 1e-9
_GAUSS_LEGENDRE = np.polynomial.legendre.leggauss(24)


def kernel_radius(t: float) -> float:
    return KERNEL_RADIUS_FACTOR * math.sqrt(t)


# --------------------------------------------------------------------------
# function specs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSpec:
    a: float
    mu: float = 0.0
    tau: float = 1.0

    kind = "gaussian"
    continuous = True

    def __post_init__(self):
        if not (self.a > 0 and self.tau > 0):
            raise DomainError("gaussian spec needs a > 0 and tau > 0")

    def to_gaussian(self) -> gs.Gaussian:
        return gs.Gaussian.from_amplitude(self.a, self.mu, self.tau)

    def __call__(self, x):
        return gs.evaluate(self.to_gaussian(), np.asarray(x, dtype=float))

    def extent(self):
        r = KERNEL_RADIUS_FACTOR * math.sqrt(self.tau)
        return self.mu - r, self.mu + r

    def scale(self) -> float:
        return math.sqrt(self.tau)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "mu": self.mu, "tau": self.tau}


@dataclass(frozen=True)
class GaussianPowerSpec:
    """heat_kernel(t) ** beta."""

    t: float
    beta: float

    kind = "gaussian_power"
    continuous = True

    def __post_init__(self):
        if not (self.t > 0 and self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError("gaussian_power spec needs t > 0 and finite beta > 0")

    def at_time(self, t: float) -> "GaussianPowerSpec":
        return GaussianPowerSpec(t, self.beta)

    def to_gaussian(self) -> gs.Gaussian:
        return gs.power(gs.heat_kernel(self.t), self.beta)

    def __call__(self, x):
        return gs.evaluate(self.to_gaussian(), np.asarray(x, dtype=float))

    def extent(self):
        r = KERNEL_RADIUS_FACTOR * math.sqrt(self.t / self.beta)
        return -r, r

    def scale(self) -> float:
        return math.sqrt(self.t / self.beta)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "t": self.t, "beta": self.beta}


@dataclass(frozen=True)
class IndicatorSpec:
    lo: float
    hi: float

    kind = "indicator"
    continuous = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"indicator needs lo < hi, got [{self.lo}, {self.hi}]")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return ((x >= self.lo) & (x <= self.hi)).astype(float)

    def extent(self):
        return self.lo, self.hi

    def scale(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class PowerLogTailSpec:
    """x^(-1/p) / log(x)^2 on [e, inf), zero elsewhere."""

    p: Exponent

    kind = "power_log_tail"
    continuous = False

    def __post_init__(self):
        object.__setattr__(self, "p", Exponent.of(self.p))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = x >= math.e
        lx = np.log(x[m])
        out[m] = np.exp(-float(self.p.recip) * lx) / lx**2
        return out

    def extent(self):
        return math.e, math.inf

    def scale(self) -> float:
        return 1.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": str(self.p)}


@dataclass(frozen=True)
class MixtureSpec:
    components: tuple  # of (weight, spec)

    kind = "mixture"

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise DomainError("mixture needs at least one component")
        if not all(math.isfinite(w) for w, _ in comps):
            raise DomainError("mixture weights must be finite")
        object.__setattr__(self, "components", comps)

    @property
    def continuous(self) -> bool:
        return all(s.continuous for _, s in self.components)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(w * s(x) for w, s in self.components)

    def extent(self):
        ext = [s.extent() for _, s in self.components]
        return min(e[0] for e in ext), max(e[1] for e in ext)

    def scale(self) -> float:
        return min(s.scale() for _, s in self.components)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "components": [{"weight": w, "spec": s.to_dict()} for w, s in self.components],
        }


FunctionSpec = Union[GaussianSpec, GaussianPowerSpec, IndicatorSpec, PowerLogTailSpec, MixtureSpec]


def spec_from_dict(d: dict) -> FunctionSpec:
    """Build a spec from its JSON object form."""
    try:
        kind = d["kind"]
        if kind == "gaussian":
            return GaussianSpec(float(d["a"]), float(d.get("mu", 0.0)), float(d.get("tau", 1.0)))
        if kind == "gaussian_power":
            return GaussianPowerSpec(float(d["t"]), float(d["beta"]))
        if kind == "indicator":
            return IndicatorSpec(float(d["lo"]), float(d["hi"]))
        if kind == "power_log_tail":
            p = d["p"]
            return PowerLogTailSpec(Exponent.of(p if isinstance(p, str) else float(p)))
        if kind == "mixture":
            return MixtureSpec(tuple((c["weight"], spec_from_dict(c["spec"])) for c in d["components"]))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed function spec {d!r}: {exc}") from None
    raise DomainError(f"unknown function spec kind {d.get('kind')!r}")


def spec_from_json(text: str) -> FunctionSpec:
    return spec_from_dict(json.loads(text))


def is_closed_form(spec) -> bool:
    return isinstance(spec, (GaussianSpec, GaussianPowerSpec))


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction:
    x_lo: float
    x_hi: float
    samples: np.ndarray
    tail: Optional[PowerLogTailSpec] = None
    # values outside [x_lo, x_hi] are exactly zero
    zero_outside: bool = False
    # region where convolution values are not affected by grid truncation
    trusted: Optional[tuple] = None

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise DomainError("a grid function needs at least two samples")
        if not self.x_lo < self.x_hi:
            raise DomainError("grid needs x_lo < x_hi")
        if not np.all(np.isfinite(s)):
            raise DomainError("grid samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n)

    def window(self) -> tuple:
        return self.trusted if self.trusted is not None else (self.x_lo, self.x_hi)

    def at(self, x):
        return np.interp(x, self.x, self.samples)

    def to_csv(self, fh) -> None:
        fh.write("x,value\n")
        for xi, vi in zip(self.x, self.samples):
            fh.write(f"{xi:.17g},{vi:.17g}\n")


def sample(spec: FunctionSpec, x_lo: float, x_hi: float, n: int) -> GridFunction:
    if not x_lo < x_hi:
        raise DomainError(f"need x_lo < x_hi, got [{x_lo}, {x_hi}]")
    if n < 2:
        raise DomainError(f"need n >= 2 samples, got {n}")
    x = np.linspace(x_lo, x_hi, n)
    lo, hi = spec.extent()
    tail = spec if isinstance(spec, PowerLogTailSpec) else None
    return GridFunction(x_lo, x_hi, spec(x), tail=tail, zero_outside=(lo >= x_lo and hi <= x_hi))


def auto_grid(spec: FunctionSpec, t: float, h: Optional[float] = None, points_per_scale: int = 16):
    """(x_lo, x_hi, n) covering the support of spec * heat_t with no truncation.

    The grid is centred on the middle of the support and has an odd
    number of points, so a symmetric profile's peak is a grid point.
    """
    lo, hi = spec.extent()
    if not math.isfinite(hi):
        raise DomainError("auto_grid needs a spec with bounded extent")
    R = kernel_radius(t)
    if h is None:
        h = min(spec.scale(), math.sqrt(t)) / points_per_scale
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) + R
    m = int(math.ceil(half / h))
    return mid - m * h, mid + m * h, 2 * m + 1


def sample_auto(spec: FunctionSpec, t: float, h: Optional[float] = None) -> GridFunction:
    return sample(spec, *auto_grid(spec, t, h))


# --------------------------------------------------------------------------
# heat flow
# --------------------------------------------------------------------------


def worker_count() -> int:
    env = os.environ.get("HEATSHARP_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise DomainError(f"HEATSHARP_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise DomainError(f"HEATSHARP_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _kernel_taps(t: float, h: float) -> np.ndarray:
    m = int(math.floor(kernel_radius(t) / h))
    return gs.evaluate(gs.heat_kernel(t), h * np.arange(m + 1))


def _direct_chunk(gp: np.ndarray, k: np.ndarray, lo: int, hi: int) -> np.ndarray:
    # Each output point sums k0*g_i + k1*(g_{i-1}+g_{i+1}) + ... in the same
    # order regardless of how the output range is partitioned.
    m = k.size - 1
    out = k[0] * gp[m + lo : m + hi]
    for j in range(1, m + 1):
        out += k[j] * (gp[m + lo - j : m + hi - j] + gp[m + lo + j : m + hi + j])
    return out


def heat_evolve(
    f: GridFunction, t: float, method: str = "direct", workers: Optional[int] = None
) -> GridFunction:
    """u_t = f * heat_t by trapezoid quadrature on the grid of f.

    ``method="fft"`` computes the same discrete sum spectrally.
    """
    if not t > 0:
        raise DomainError(f"heat_evolve needs t > 0, got {t}")
    h = f.h
    R = kernel_radius(t)
    if R > 0.5 * (f.x_hi - f.x_lo):
        warnings.warn(
            f"kernel radius {R:.4g} exceeds grid half-width {0.5 * (f.x_hi - f.x_lo):.4g}",
            TruncationWarning,
            stacklevel=2,
        )
    if h > math.sqrt(t):
        warnings.warn(
            f"grid spacing {h:.4g} exceeds the kernel scale sqrt(t) = {math.sqrt(t):.4g}; "
            "the quadrature does not resolve the kernel",
            RuntimeWarning,
            stacklevel=2,
        )
    k = _kernel_taps(t, h)
    g = np.array(f.samples)
    g[0] *= 0.5
    g[-1] *= 0.5

    if method == "fft":
        full = np.concatenate([k[:0:-1], k])
        u = h * fftconvolve(g, full, mode="same")
    elif method == "direct":
        m = k.size - 1
        gp = np.pad(g, m)
        nw = workers if workers is not None else worker_count()
        nw = max(1, min(nw, f.n // 4096 or 1))
        bounds = np.linspace(0, f.n, nw + 1).astype(int)
        if nw == 1:
            u = _direct_chunk(gp, k, 0, f.n)
        else:
            with ThreadPoolExecutor(nw) as ex:
                parts = ex.map(lambda b: _direct_chunk(gp, k, *b), zip(bounds[:-1], bounds[1:]))
                u = np.concatenate(list(parts))
        u *= h
    else:
        raise DomainError(f"unknown convolution method {method!r}")

    if f.zero_outside:
        trusted = f.trusted
    else:
        lo, hi = f.window()
        trusted = (lo + R, hi - R)
    return GridFunction(f.x_lo, f.x_hi, u, tail=None, zero_outside=False, trusted=trusted)


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------


def gauss_legendre(func, a: float, b: float, panel: float = 1.0) -> float:
    """Composite 24-point Gauss-Legendre rule on panels of width <= ``panel``."""
    if b <= a:
        return 0.0
    nodes, weights = _GAUSS_LEGENDRE
    k = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, k + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    x = mids[:, None] + half[:, None] * nodes[None, :]
    return float(np.sum(half[:, None] * weights[None, :] * func(x)))


def power_log_integral(p: ExponentLike, s: ExponentLike, u_lo: float, u_hi: float) -> float:
    """Integral of (x^(-1/p) / log(x)^2)^s over x in [e^u_lo, e^u_hi].

    After u = log x the integrand is exp((1 - s/p) u) * u^(-2 s).
    """
    p, s = Exponent.of(p), Exponent.of(s)
    if s.is_infinite:
        raise DomainError("power_log_integral needs finite s")
    sv = s.value
    kappa = 1.0 - sv * float(p.recip)
    if not math.isfinite(u_hi):
        if kappa != 0 or 2 * sv <= 1:
            raise DomainError("the tail integral diverges")
        # w = 1/u maps [u_lo, inf) to (0, 1/u_lo]
        return gauss_legendre(lambda w: w ** (2 * sv - 2), 0.0, 1.0 / u_lo, panel=0.05 / u_lo)
    return gauss_legendre(lambda u: np.exp(kappa * u - 2 * sv * np.log(u)), u_lo, u_hi)


def lp_norm_grid(f: GridFunction, p: ExponentLike) -> float:
    """Trapezoid L^p norm over the trusted window, plus any analytic tail."""
    p = Exponent.of(p)
    lo, hi = f.window()
    x = f.x
    m = (x >= lo - 1e-9 * f.h) & (x <= hi + 1e-9 * f.h)
    if m.sum() < 2:
        raise DomainError("trusted window holds fewer than two samples")
    a = np.abs(f.samples[m])
    if p.is_infinite:
        # the tail is decreasing, so its sup beyond the grid is attained at x_hi
        sup = float(np.max(a))
        if f.tail is not None:
            sup = max(sup, float(f.tail(np.array([hi]))[0]))
        return sup
    pv = p.value
    mass = float(np.trapezoid(a if pv == 1 else a**pv, dx=f.h))
    if f.tail is not None and f.trusted is None:
        mass += _tail_beyond(f.tail, p, hi)
    return mass ** (1.0 / pv)


def _tail_beyond(tail: PowerLogTailSpec, p: Exponent, x_hi: float) -> float:
    sv = p.value
    kappa = 1.0 - sv * float(tail.p.recip)
    if kappa < 0:
        # integrand exp(kappa u) u^(-2s) decays exponentially; cut at 60/|kappa| e-folds
        u0 = math.log(max(x_hi, math.e))
        return power_log_integral(tail.p, p, u0, u0 + 60.0 / -kappa)
    if kappa == 0:
        return power_log_integral(tail.p, p, math.log(max(x_hi, math.e)), math.inf)
    return math.inf


# --------------------------------------------------------------------------
# checks on the PDE and the monotone lower bound
# --------------------------------------------------------------------------


def pde_residual(spec: FunctionSpec, t: float, x_window: Sequence[float], h: float, delta: float) -> float:
    """max |u_xx - u_t| over the window, both by central differences."""
    if not 0 < delta < t:
        raise DomainError(f"pde_residual needs 0 < delta < t, got delta={delta}, t={t}")
    wlo, whi = x_window
    lo, hi = spec.extent()
    if not math.isfinite(hi):
        raise DomainError("pde_residual needs a spec with bounded extent")
    R = kernel_radius(t + delta)
    left = min(lo - R, wlo - h)
    right = max(hi + R, whi + h)
    ml = int(math.ceil((wlo - left) / h))
    mr = int(math.ceil((right - wlo) / h))
    # grid anchored on the window's left end
    f = sample(spec, wlo - ml * h, wlo + mr * h, ml + mr + 1)
    u_minus, u_0, u_plus = (heat_evolve(f, s).samples for s in (t - delta, t, t + delta))
    u_t = (u_plus - u_minus) / (2.0 * delta)
    u_xx = np.full_like(u_0, np.nan)
    u_xx[1:-1] = (u_0[2:] - 2.0 * u_0[1:-1] + u_0[:-2]) / h**2
    x = f.x
    m = (x >= wlo - 1e-9 * h) & (x <= whi + 1e-9 * h)
    return float(np.max(np.abs(u_xx[m] - u_t[m])))


def monotone_tail_bound_factor(x: float, c: float, t: float) -> float:
    """(1/sqrt(pi)) * integral_0^{(x-c)/(2 sqrt t)} exp(-y^2) dy = erf(.)/2."""
    if not t > 0:
        raise DomainError(f"need t > 0, got {t}")
    if x < c:
        raise DomainError(f"need x >= c, got x={x}, c={c}")
    return 0.5 * math.erf((x - c) / (2.0 * math.sqrt(t)))
