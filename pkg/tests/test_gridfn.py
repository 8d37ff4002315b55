import io
import json
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import erf

from heatsharp import constants as cs
from heatsharp import gaussian as gs
from heatsharp import gridfn as gf
from heatsharp.errors import DomainError, TruncationWarning
from heatsharp.exponents import young_r


def test_sample_examples():
    f = gf.sample(gf.IndicatorSpec(-1, 1), -2, 2, 5)
    assert list(f.samples) == [0, 1, 1, 1, 0]
    assert f.zero_outside
    f = gf.sample(gf.GaussianSpec(1.0, 0.0, 1.0), -1, 1, 3)
    assert f.samples[1] == 1.0
    assert f.samples[0] == pytest.approx(math.exp(-0.25))
    with pytest.raises(DomainError):
        gf.sample(gf.IndicatorSpec(0, 1), 1, 0, 5)
    with pytest.raises(DomainError):
        gf.sample(gf.IndicatorSpec(0, 1), 0, 1, 1)


def test_grid_samples_are_read_only():
    f = gf.sample(gf.IndicatorSpec(0, 1), -1, 2, 31)
    with pytest.raises(ValueError):
        f.samples[0] = 3.0


def test_power_log_tail_values():
    spec = gf.PowerLogTailSpec("2")
    assert spec(np.array([1.0, 2.7]))[0] == 0.0
    assert spec(np.array([math.e ** 2]))[0] == pytest.approx(math.exp(-1) / 4)


def test_spec_json_round_trip():
    specs = [
        gf.GaussianSpec(2.0, 1.0, 0.5),
        gf.GaussianPowerSpec(1.0, 3.0),
        gf.IndicatorSpec(-1.0, 2.0),
        gf.PowerLogTailSpec("4/3"),
        gf.MixtureSpec(((0.5, gf.IndicatorSpec(0.0, 1.0)), (-2.0, gf.GaussianSpec(1.0)))),
    ]
    for s in specs:
        back = gf.spec_from_json(json.dumps(s.to_dict()))
        assert back == s
    with pytest.raises(DomainError):
        gf.spec_from_dict({"kind": "sawtooth"})
    with pytest.raises(DomainError):
        gf.spec_from_dict({"kind": "indicator", "lo": 0.0})


def test_auto_grid_is_symmetric_and_covers_kernel():
    spec = gf.IndicatorSpec(-1.0, 3.0)
    lo, hi, n = gf.auto_grid(spec, 2.0)
    assert n % 2 == 1
    assert lo + hi == pytest.approx(2.0)
    assert lo <= -1.0 - gf.kernel_radius(2.0) and hi >= 3.0 + gf.kernel_radius(2.0)


def test_kernel_radius_cutoff():
    # the kernel ratio at the cutoff is below 1e-16
    assert math.exp(-gf.KERNEL_RADIUS_FACTOR**2 / 4) < 1e-16


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_indicator_mollification_matches_erf(t):
    spec = gf.IndicatorSpec(-1.0, 1.0)
    f = gf.sample_auto(spec, t, h=min(2.0, math.sqrt(t)) / 64)
    u = gf.heat_evolve(f, t)
    x = u.x
    exact = 0.5 * (erf((x + 1) / (2 * math.sqrt(t))) - erf((x - 1) / (2 * math.sqrt(t))))
    # the jump sits on a grid node, which costs O(h) per edge
    assert np.max(np.abs(u.samples - exact)) <= f.h * gs.evaluate(gs.heat_kernel(t), 0.0)


@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_heat_evolve_matches_closed_form_gaussian(t):
    spec = gf.GaussianSpec(1.5, 0.3, 0.7)
    f = gf.sample_auto(spec, t)
    u = gf.heat_evolve(f, t)
    exact = gs.evaluate(gs.convolve(spec.to_gaussian(), gs.heat_kernel(t)), u.x)
    assert np.max(np.abs(u.samples - exact)) <= 1e-10


def test_grid_semigroup():
    spec = gf.IndicatorSpec(-0.5, 0.5)
    t, s = 0.3, 0.7
    h = 0.01
    lo, hi, n = gf.auto_grid(spec, t + s, h)
    f = gf.sample(spec, lo, hi, n)
    two_step = gf.heat_evolve(gf.heat_evolve(f, t), s)
    one_step = gf.heat_evolve(f, t + s)
    assert np.max(np.abs(two_step.samples - one_step.samples)) <= 1e-8


def test_fft_agrees_with_direct():
    spec = gf.MixtureSpec(((1.0, gf.IndicatorSpec(-1.0, 0.5)), (0.5, gf.GaussianSpec(2.0, 1.0, 0.2))))
    f = gf.sample_auto(spec, 0.5)
    d = gf.heat_evolve(f, 0.5, method="direct")
    F = gf.heat_evolve(f, 0.5, method="fft")
    assert np.max(np.abs(d.samples - F.samples)) <= 1e-12
    with pytest.raises(DomainError):
        gf.heat_evolve(f, 0.5, method="spectral")


def test_direct_is_bitwise_identical_across_workers():
    f = gf.sample(gf.IndicatorSpec(-3.0, 2.0), -20.0, 20.0, 20001)
    ref = gf.heat_evolve(f, 1.0, workers=1).samples
    for w in (2, 3, 4):
        assert np.array_equal(gf.heat_evolve(f, 1.0, workers=w).samples, ref)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("HEATSHARP_THREADS", "3")
    assert gf.worker_count() == 3
    monkeypatch.setenv("HEATSHARP_THREADS", "zero")
    with pytest.raises(DomainError):
        gf.worker_count()
    monkeypatch.setenv("HEATSHARP_THREADS", "0")
    with pytest.raises(DomainError):
        gf.worker_count()


def test_truncation_and_resolution_warnings():
    f = gf.sample(gf.IndicatorSpec(-1.0, 1.0), -2.0, 2.0, 401)
    with pytest.warns(TruncationWarning):
        gf.heat_evolve(f, 1.0)
    g = gf.sample(gf.IndicatorSpec(-1.0, 1.0), -30.0, 30.0, 61)
    with pytest.warns(RuntimeWarning, match="spacing"):
        gf.heat_evolve(g, 0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gf.heat_evolve(gf.sample_auto(gf.IndicatorSpec(-1.0, 1.0), 1.0), 1.0)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_mass_conservation(t):
    spec = gf.IndicatorSpec(-1.0, 2.0)
    f = gf.sample_auto(spec, t)
    u = gf.heat_evolve(f, t)
    assert gf.lp_norm_grid(u, "1") == pytest.approx(gf.lp_norm_grid(f, "1"), rel=1e-12)


@pytest.mark.parametrize("p", ["1", "3/2", "2", "4", "inf"])
def test_contraction_on_grid(p):
    spec = gf.MixtureSpec(((1.0, gf.IndicatorSpec(-1.0, 0.0)), (2.0, gf.IndicatorSpec(0.5, 0.8))))
    f = gf.sample_auto(spec, 1.0)
    u = gf.heat_evolve(f, 1.0)
    assert gf.lp_norm_grid(u, p) <= gf.lp_norm_grid(f, p) * (1 + 1e-12)


def test_lp_norm_grid_examples():
    f = gf.sample(gf.IndicatorSpec(0.0, 2.0), -1.0, 3.0, 4001)
    # trapezoid puts a half-cell on each jump
    assert gf.lp_norm_grid(f, "1") == pytest.approx(2.0 + f.h, rel=1e-12)
    assert gf.lp_norm_grid(f, "inf") == 1.0
    g = gf.sample(gf.GaussianSpec(1.0, 0.0, 0.5), -15.0, 15.0, 3001)
    for p in ("1", "2", "3"):
        assert gf.lp_norm_grid(g, p) == pytest.approx(gs.lp_norm(gs.Gaussian(0.0, 0.0, 0.5), p), rel=1e-12)


@pytest.mark.parametrize("pq,t", [(("4/3", "4/3"), 1.0), (("3/2", "2"), 0.5), (("3", "5/4"), 4.0)])
def test_grid_norms_agree_with_gaussian_calculus(pq, t):
    tr = young_r(*pq)
    beta = cs.extremal_beta(*pq)
    spec = gf.GaussianPowerSpec(t, beta)
    f = gf.sample_auto(spec, t)
    u = gf.heat_evolve(f, t)
    g = spec.to_gaussian()
    assert gf.lp_norm_grid(f, tr.p) == pytest.approx(gs.lp_norm(g, tr.p), rel=1e-6)
    assert gf.lp_norm_grid(u, tr.r) == pytest.approx(
        gs.lp_norm(gs.convolve(g, gs.heat_kernel(t)), tr.r), rel=1e-6)


def mp_power_log(p, s, lo, hi):
    p, s = mpmath.mpf(p), mpmath.mpf(s)
    return mpmath.quad(lambda x: (x ** (-1 / p) / mpmath.log(x) ** 2) ** s, [lo, 10 * lo, hi])


@pytest.mark.parametrize("p,s", [(2, 2), (2, 1.5), (4, 2), (3, 1)])
def test_power_log_integral_against_multiprecision(p, s):
    lo, hi = math.e, 1e4
    got = gf.power_log_integral(p, s, 1.0, math.log(hi))
    assert got == pytest.approx(float(mp_power_log(p, s, lo, hi)), rel=1e-10)


def test_power_log_integral_infinite_range():
    # s = p gives the exact value 1/(2p - 1) over [e, inf)
    for p in (1.5, 2.0, 4.0):
        assert gf.power_log_integral(p, p, 1.0, math.inf) == pytest.approx(1 / (2 * p - 1), rel=1e-13)
    with pytest.raises(DomainError):
        gf.power_log_integral(2, 1, 1.0, math.inf)


def test_lp_norm_grid_adds_tail():
    f = gf.sample(gf.PowerLogTailSpec("2"), 0.0, 40.0, 40001)
    assert not f.zero_outside and f.tail is not None
    # ||f||_2^2 = 1/3; the jump at e costs O(h)
    assert gf.lp_norm_grid(f, "2") ** 2 == pytest.approx(1 / 3, abs=1e-3)
    assert gf.lp_norm_grid(f, "1") == math.inf


@settings(max_examples=25, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 2.0), st.floats(0.05, 5.0))
def test_gaussian_grid_oracle_random(mu, tau, t):
    spec = gf.GaussianSpec(1.0, mu, tau)
    f = gf.sample_auto(spec, t)
    u = gf.heat_evolve(f, t)
    exact = gs.lp_norm(gs.convolve(spec.to_gaussian(), gs.heat_kernel(t)), "2")
    assert gf.lp_norm_grid(u, "2") == pytest.approx(exact, rel=1e-6)


def test_pde_residual_examples():
    spec = gf.GaussianSpec(1.0, 0.0, 0.5)
    r1 = gf.pde_residual(spec, 1.0, (-5.0, 5.0), 0.01, 1e-3)
    assert r1 <= 1e-4
    # both differences are second order, so shrinking h and delta together cuts the residual
    r2 = gf.pde_residual(spec, 1.0, (-5.0, 5.0), 0.005, 5e-4)
    assert r2 < r1
    with pytest.raises(DomainError):
        gf.pde_residual(spec, 1.0, (-1.0, 1.0), 0.01, 1.0)
    with pytest.raises(DomainError):
        gf.pde_residual(gf.PowerLogTailSpec("2"), 1.0, (5.0, 6.0), 0.01, 1e-3)


def test_pde_residual_on_indicator():
    assert gf.pde_residual(gf.IndicatorSpec(-1.0, 1.0), 1.0, (-5.0, 5.0), 0.01, 1e-3) <= 1e-4


@pytest.mark.parametrize("x,c,t", [(5.0, 3.0, 1.0), (10.0, 0.0, 4.0), (3.1, 3.0, 0.01), (7.0, 2.0, 100.0)])
def test_monotone_tail_bound_factor_against_multiprecision(x, c, t):
    upper = (x - c) / (2 * math.sqrt(t))
    expected = mpmath.quad(lambda y: mpmath.exp(-y * y), [0, upper]) / mpmath.sqrt(mpmath.pi)
    assert gf.monotone_tail_bound_factor(x, c, t) == pytest.approx(float(expected), rel=1e-14)


def test_monotone_tail_bound_factor_edges():
    assert gf.monotone_tail_bound_factor(3.0, 3.0, 1.0) == 0.0
    assert gf.monotone_tail_bound_factor(1e6, 0.0, 1.0) == pytest.approx(0.5, abs=1e-16)
    with pytest.raises(DomainError):
        gf.monotone_tail_bound_factor(2.0, 3.0, 1.0)
    with pytest.raises(DomainError):
        gf.monotone_tail_bound_factor(5.0, 3.0, 0.0)


def test_csv_export():
    f = gf.sample(gf.IndicatorSpec(0.0, 1.0), 0.0, 1.0, 3)
    buf = io.StringIO()
    f.to_csv(buf)
    assert buf.getvalue() == "x,value\n0,1\n0.5,1\n1,1\n"


def test_at_interpolates():
    f = gf.sample(gf.GaussianSpec(1.0), -10.0, 10.0, 2001)
    assert f.at(0.0) == pytest.approx(1.0)
    assert f.at(1.0) == pytest.approx(math.exp(-0.25), rel=1e-12)


def test_quadrature_oracle_for_evolved_indicator():
    spec = gf.IndicatorSpec(0.0, 1.0)
    t = 0.5
    u = gf.heat_evolve(gf.sample_auto(spec, t, h=1 / 256), t)
    for x in (-0.5, 0.2, 1.7):
        val, _ = quad(lambda y: gs.evaluate(gs.heat_kernel(t), x - y), 0.0, 1.0, epsrel=1e-13)
        assert float(u.at(x)) == pytest.approx(val, abs=2e-3)


@pytest.mark.parametrize("p", ["1", "3/2", "2", "4", "inf"])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_oracle_equivalence_matrix(p, t):
    spec = gf.GaussianSpec(0.8, -0.4, 0.6)
    u = gf.heat_evolve(gf.sample_auto(spec, t), t)
    exact = gs.lp_norm(gs.convolve(spec.to_gaussian(), gs.heat_kernel(t)), p)
    assert gf.lp_norm_grid(u, p) == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_lower_bound_at_every_trusted_point(t):
    spec = gf.PowerLogTailSpec("2")
    h = 0.01
    n = int((200.0 + 2 * gf.kernel_radius(t)) / h) + 1
    f = gf.sample(spec, 0.0, (n - 1) * h, n)
    u = gf.heat_evolve(f, t)
    lo, hi = u.window()
    x = u.x
    m = (x > math.e) & (x >= lo) & (x <= hi)
    bound = np.array([gf.monotone_tail_bound_factor(xi, math.e, t) for xi in x[m]])
    assert np.all(u.samples[m] >= spec(x[m]) * bound * (1 - 1e-6))


def test_bound_factor_examples():
    assert gf.monotone_tail_bound_factor(50.0, 1.0, 1.0) == pytest.approx(0.5, abs=1e-6)
    assert gf.monotone_tail_bound_factor(3.0, 1.0, 1.0) == pytest.approx(math.erf(1.0) / 2, rel=1e-15)


def test_pde_residual_delta_halving_is_stable():
    spec = gf.GaussianSpec(1.0, 0.0, 1.0)
    r1 = gf.pde_residual(spec, 1.0, (-10.0, 10.0), 0.01, 1e-3)
    r2 = gf.pde_residual(spec, 1.0, (-10.0, 10.0), 0.01, 5e-4)
    assert r2 <= 2 * r1


def test_pde_residual_for_heat_kernel_itself():
    th = gs.heat_kernel(0.5)
    assert gf.pde_residual(gf.GaussianSpec(th.a, 0.0, 0.5), 1.0, (-10.0, 10.0), 0.01, 1e-3) <= 1e-4
