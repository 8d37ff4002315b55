"""The acceptance matrix: one check per criterion, each at a fixed tolerance.

Each check returns a :class:`CriterionResult`; :func:`run_all` prints a
pass/fail table.  The CLI ``selftest`` subcommand and the pytest
acceptance module both run these same functions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constants as cs
from . import experiments as ex
from . import gaussian as gs
from . import gridfn
from .exponents import SAMPLE_GRID, admissible_pairs, young_r

T_GRID = (0.1, 1.0, 10.0)
FUZZ_SEED = 20230102


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>2}. {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _finite_interior_pairs():
    return [(p, q) for p, q in admissible_pairs(SAMPLE_GRID)
            if 0 < p.recip < 1 and 0 < q.recip < 1]


def criterion_semigroup():
    th1, th2 = gs.heat_kernel(1.0), gs.heat_kernel(2.0)
    conv = gs.convolve(th1, th1)
    field_err = max(abs(conv.log_a - th2.log_a), abs(conv.mu - th2.mu), abs(conv.tau - th2.tau))
    spec1 = gridfn.GaussianSpec(th1.a, 0.0, 1.0)
    spec2 = gridfn.GaussianSpec(th2.a, 0.0, 2.0)
    f = gridfn.sample(spec1, -40.0, 40.0, 8001)
    u = gridfn.heat_evolve(f, 1.0)
    sup_err = float(np.max(np.abs(u.samples - spec2(f.x))))
    ok = field_err <= 1e-14 and sup_err <= 1e-8
    return ok, f"closed-form field error {field_err:.2e} (<=1e-14), grid sup error {sup_err:.2e} (<=1e-8)"


def criterion_kernel_norms():
    worst_closed = worst_grid = 0.0
    for q in ("1", "4/3", "2", "3", "inf"):
        for t in T_GRID:
            expected = cs.alpha(q) * t ** (-cs.decay_exponent(q))
            closed = gs.lp_norm(gs.heat_kernel(t), q)
            spec = gridfn.GaussianPowerSpec(t, 1.0)
            grid = gridfn.lp_norm_grid(gridfn.sample(spec, *gridfn.auto_grid(spec, 1e-6 * t, math.sqrt(t) / 16)), q)
            worst_closed = max(worst_closed, abs(closed / expected - 1.0))
            worst_grid = max(worst_grid, abs(grid / expected - 1.0))
    ok = worst_closed <= 1e-13 and worst_grid <= 1e-8
    return ok, f"closed-form rel error {worst_closed:.2e} (<=1e-13), quadrature rel error {worst_grid:.2e} (<=1e-8)"


def criterion_constant_identity():
    worst = max(cs.rhs_identity_check(young_r(p, q)) for p, q in admissible_pairs(SAMPLE_GRID))
    return worst <= 1e-12, f"max identity defect {worst:.2e} over {len(admissible_pairs(SAMPLE_GRID))} pairs (<=1e-12)"


def criterion_contraction():
    worst = max(abs(cs.heat_estimate_constant(p, "1") - 1.0) for p in SAMPLE_GRID)
    return worst <= 1e-14, f"max |K(p,1) - 1| = {worst:.2e} (<=1e-14)"


def criterion_equality():
    worst_closed = worst_grid = 0.0
    pairs = _finite_interior_pairs()
    for p, q in pairs:
        beta = cs.extremal_beta(p, q)
        for t in T_GRID:
            spec = gridfn.GaussianPowerSpec(t, beta)
            worst_closed = max(worst_closed, abs(ex.sharpness_ratio(spec, t, p, q, "closed") - 1.0))
            worst_grid = max(worst_grid, abs(ex.sharpness_ratio(spec, t, p, q, "grid") - 1.0))
    ok = worst_closed <= 1e-10 and worst_grid <= 1e-4
    return ok, (f"{len(pairs)} pairs x 3 times: closed |rho-1| {worst_closed:.2e} (<=1e-10), "
                f"grid |rho-1| {worst_grid:.2e} (<=1e-4)")


def random_gaussian_specs(rng, n):
    return [
        gridfn.GaussianSpec(float(rng.uniform(0.1, 10.0)), float(rng.uniform(-5.0, 5.0)),
                            float(math.exp(rng.uniform(math.log(0.01), math.log(100.0)))))
        for _ in range(n)
    ]


def random_mixed_specs(rng, n):
    specs = []
    for i in range(n):
        if i % 2 == 0:
            lo = float(rng.uniform(-3.0, 2.0))
            specs.append(gridfn.IndicatorSpec(lo, lo + float(rng.uniform(0.2, 4.0))))
        else:
            k = int(rng.integers(2, 4))
            comps = []
            for _ in range(k):
                if rng.uniform() < 0.25:
                    lo = float(rng.uniform(-3.0, 2.0))
                    comp = gridfn.IndicatorSpec(lo, lo + float(rng.uniform(0.2, 3.0)))
                else:
                    comp = gridfn.GaussianSpec(1.0, float(rng.uniform(-3.0, 3.0)), float(rng.uniform(0.05, 4.0)))
                comps.append((float(rng.uniform(0.2, 2.0)), comp))
            specs.append(gridfn.MixtureSpec(tuple(comps)))
    return specs


def criterion_fuzz():
    rng = np.random.default_rng(FUZZ_SEED)
    pairs = admissible_pairs(SAMPLE_GRID)
    worst = -math.inf
    for spec in random_gaussian_specs(rng, 200):
        for p, q in pairs:
            for t in T_GRID:
                worst = max(worst, ex.sharpness_ratio(spec, t, p, q, "closed"))
    worst_grid = -math.inf
    for spec in random_mixed_specs(rng, 50):
        for t in T_GRID:
            for p, q in pairs:
                worst_grid = max(worst_grid, ex.sharpness_ratio(spec, t, p, q, "grid"))
        ex.evolved_on_grid.cache_clear()
    ok = worst <= 1 + 1e-6 and worst_grid <= 1 + 1e-6
    return ok, (f"max rho - 1: 200 Gaussians {worst - 1:.2e}, 50 mixtures/indicators {worst_grid - 1:.2e} "
                f"(<=1+1e-6, {len(pairs)} pairs x 3 times)")


def criterion_equality_root():
    worst = 0.0
    no_crossing, turning = [], []
    for p, q in _finite_interior_pairs():
        tr = young_r(p, q)
        beta = cs.extremal_beta(p, q)
        worst = max(worst, abs(cs.equality_residual(beta, tr)))
        if cs.residual_sign_changes(tr, beta) != 1:
            no_crossing.append(f"({p},{q})")
        turning.append(cs.residual_turning_points(tr, beta))
    ok = worst <= 1e-12 and not no_crossing
    return ok, (f"max |residual(beta*)| {worst:.2e} (<=1e-12); "
                f"{len(no_crossing)}/{len(turning)} pairs lack exactly one residual sign change "
                f"(residual <= 0, tangent at beta*); turning points per pair: {sorted(set(turning))}")


def criterion_decay_rate():
    parts, ok = [], True
    for p, q, want in (("4/3", "4/3", -0.125), ("1", "inf", -0.5), ("2", "1", 0.0)):
        rec = ex.decay_slope(p, q, ex.extremal_family(p, q), 1.0, 100.0, 9)
        slope = rec.params["slope"]
        ok &= abs(slope - want) <= 1e-3 and rec.verdict == "pass"
        parts.append(f"({p},{q}) slope {slope:.6f} vs {want}")
    return ok, "; ".join(parts) + " (tol 1e-3)"


def criterion_blowup():
    parts, ok = [], True
    for p, q in (("4/3", "4/3"), ("1", "inf"), ("2", "2"), ("3/2", "3")):
        gamma = cs.decay_exponent(q) - 0.1
        rec = ex.blowup_ratio(p, q, ex.DecayModulus(gamma), np.geomspace(1e-6, 1.0, 13))
        slope = rec.params["slope"]
        growth = rec.rows[0].value / rec.rows[-1].value
        ok &= abs(slope + 0.1) <= 1e-9 and growth >= 0.99 * 10**0.6 and rec.ok
        parts.append(f"({p},{q}) slope {slope:+.12f}, rho(1e-6)/rho(1) {growth:.6f}")
    return ok, "; ".join(parts) + f" (need -0.1 +- 1e-9, >= {0.99 * 10 ** 0.6:.6f})"


def criterion_counterexample():
    L = np.geomspace(1e6, 1e12, 25)
    rec = ex.counterexample_norms("2", "3/2", L, fit_range=(1e6, 1e12))
    partial = rec.params["p_partials"][-1]
    gap = abs(partial - 1.0 / 3.0)
    fit = rec.params["fitted_exponent"]
    lb = ex.counterexample_lower_bound_check("2", 1.0, [50.0, 100.0, 200.0, 500.0, 1000.0])
    min_ratio = min(r.value for r in lb.rows)
    checks = {
        "partial ||f||_2^2 within 1e-6 of 1/3 at L=1e12": gap <= 1e-6,
        "exponent 0.25 +- 0.05": abs(fit - 0.25) <= 0.05,
        "no Cauchy stabilization": rec.params["s_partials_diverging"],
        "lower bound holds": lb.verdict == "pass",
        "ratio >= 0.45 for x >= 50": min_ratio >= 0.45,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"|I_2(1e12) - 1/3| = {gap:.3e}; fitted exponent {fit:.4f}; min ratio {min_ratio:.6f}; "
              f"failed: {failed or 'none'}")
    return not failed, detail


def criterion_initial_condition():
    rec = ex.initial_convergence(gridfn.GaussianSpec(1.0, 0.0, 1.0), "2", [1e-1, 1e-2, 1e-3, 1e-4])
    vals = [r.value for r in sorted(rec.rows, key=lambda r: -r.x)]
    return rec.verdict == "pass", "||u_t - f||_2 = " + ", ".join(f"{v:.3e}" for v in vals) + " (final < 1e-2)"


def criterion_pde_residual():
    res = gridfn.pde_residual(gridfn.GaussianSpec(1.0, 0.0, 1.0), 1.0, (-10.0, 10.0), 0.01, 1e-3)
    return res <= 1e-4, f"max |u_xx - u_t| = {res:.3e} (<=1e-4)"


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "semigroup law", criterion_semigroup),
    (2, "heat kernel norms", criterion_kernel_norms),
    (3, "constant identity", criterion_constant_identity),
    (4, "contraction endpoint", criterion_contraction),
    (5, "equality case", criterion_equality),
    (6, "inequality fuzzing", criterion_fuzz),
    (7, "equality-equation root", criterion_equality_root),
    (8, "decay rate", criterion_decay_rate),
    (9, "blow-up ratio", criterion_blowup),
    (10, "counterexample", criterion_counterexample),
    (11, "initial condition", criterion_initial_condition),
    (12, "PDE residual", criterion_pde_residual),
]


def run_criterion(number: int) -> CriterionResult:
    for num, title, fn in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(num, title, bool(passed), detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_all(out=print) -> list[CriterionResult]:
    results = []
    for num, _, _ in CRITERIA:
        res = run_criterion(num)
        out(res.line())
        results.append(res)
    n_pass = sum(r.passed for r in results)
    out(f"{n_pass}/{len(results)} criteria passed")
    return results
