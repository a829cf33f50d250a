import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dfmorder import (
    CEqualsOne,
    InsideSupport,
    RmtContext,
    g_tau0,
    lsd_cdf,
    lsd_density,
    lsd_edge,
    lsd_stieltjes,
    lsd_support,
    mp_companion_stieltjes,
    mp_edges,
    mp_stieltjes,
    solve_y1,
    spike_location_tau0,
    stieltjes_edge_m1,
)
from dfmorder.rmt import _half_integral


def mp_stieltjes_quad(ell, c):
    """Oracle: integrate the explicit MP density against 1/(x - ell)."""
    lo, hi = (1 - math.sqrt(c)) ** 2, (1 + math.sqrt(c)) ** 2
    # weight 'alg' carries sqrt(x - lo) sqrt(hi - x) exactly; at c = 1 the
    # left edge is 0 and the 1/x factor moves into the weight
    if lo == 0.0:
        fun, wvar = (lambda x: 1.0 / (2 * math.pi * c * (x - ell))), (-0.5, 0.5)
    else:
        fun, wvar = (lambda x: 1.0 / (2 * math.pi * c * x * (x - ell))), (0.5, 0.5)
    val, _ = integrate.quad(fun, lo, hi, weight="alg", wvar=wvar, epsabs=1e-13, epsrel=1e-12, limit=200)
    if c > 1:
        val += (1 - 1 / c) / (0.0 - ell)
    return val


def textbook_density(x, c, dps=50):
    """Oracle: the original density formula evaluated in high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        c = mpmath.mpf(c)
        coeffs = [1, -((1 - c) ** 2 - x**2) / x**2, -4 / x**2, -4 / x**2]
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        y0 = max(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-30))
        rad = y0**2 / (1 + y0) - ((1 - c) / abs(x) + 1 / mpmath.sqrt(1 + y0)) ** 2
        return float(mpmath.sqrt(rad) / (2 * c * mpmath.pi)) if rad > 0 else 0.0


# ---------------------------------------------------------------- MP law


def test_mp_edges():
    lo, hi = mp_edges(RmtContext(0.9))
    assert lo == pytest.approx(0.0026334, abs=1e-6)
    assert hi == pytest.approx(3.7974, abs=1e-4)
    lo2, hi2 = mp_edges(RmtContext(0.9, 2.5))
    assert (lo2, hi2) == pytest.approx((2.5 * lo, 2.5 * hi))


@pytest.mark.parametrize("c", [0.25, 0.9, 1.0, 2.0])
def test_mp_stieltjes_against_quadrature(c):
    ctx = RmtContext(c)
    lo, hi = mp_edges(ctx)
    pts = [hi + 0.01, hi + 1.0, 3 * hi, 50.0, -0.5, -5.0]
    if c < 1:
        pts.append(lo / 2)
    for ell in pts:
        assert mp_stieltjes(ell, ctx) == pytest.approx(mp_stieltjes_quad(ell, c), abs=1e-9)


def test_mp_stieltjes_closed_values():
    # c = 1: m = (-ell + sqrt(ell^2 - 4 ell)) / (2 ell)
    assert mp_stieltjes(5.0, RmtContext(1.0)) == pytest.approx((-5 + math.sqrt(5)) / 10, abs=1e-12)
    assert mp_stieltjes(0.0, RmtContext(0.5)) == pytest.approx(2.0)
    with pytest.raises(InsideSupport):
        mp_stieltjes(1.0, RmtContext(0.5))


def test_mp_stieltjes_sigma_scaling():
    m1 = mp_stieltjes(7.0, RmtContext(0.4))
    m2 = mp_stieltjes(14.0, RmtContext(0.4, 2.0))
    assert m2 == pytest.approx(m1 / 2.0, rel=1e-14)


def test_companion_identity():
    ctx = RmtContext(0.6)
    ell = 6.0
    m = mp_stieltjes(ell, ctx)
    assert mp_companion_stieltjes(ell, ctx) == pytest.approx(-(1 - 0.6) / ell + 0.6 * m)
    # g(ell) = ell m mbar = -ell m - 1 on the real axis outside the support
    assert ell * m * mp_companion_stieltjes(ell, ctx) == pytest.approx(g_tau0(ell, ctx), rel=1e-12)


@pytest.mark.parametrize("c", [0.1, 0.25, 0.9, 1.0, 3.0])
def test_g_tau0_edge_and_monotone(c):
    ctx = RmtContext(c)
    edge = mp_edges(ctx)[1]
    assert g_tau0(edge, ctx) == pytest.approx(1 / math.sqrt(c), rel=1e-6)
    vals = [g_tau0(x, ctx) for x in np.linspace(edge * 1.001, edge * 50, 200)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(InsideSupport):
        g_tau0(edge * 0.99, ctx)


def test_g_tau0_values():
    assert g_tau0(2.25, RmtContext(0.25)) == pytest.approx(2.0, abs=1e-12)
    assert g_tau0(5.0, RmtContext(1.0)) == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 20.0), st.floats(1.0001, 1000.0), st.sampled_from([0.5, 1.0, 3.0]))
def test_spike_location_oracle(c, ratio, sigma2):
    alpha = math.sqrt(c) * ratio
    got = spike_location_tau0(alpha, RmtContext(c, sigma2))
    expected = (1 + alpha) * (1 + c / alpha) * sigma2
    assert got == pytest.approx(expected, rel=1e-10)


def test_spike_location_no_outlier():
    assert spike_location_tau0(0.9, RmtContext(0.81)) is None
    assert spike_location_tau0(0.5, RmtContext(0.9)) is None
    with pytest.raises(ValueError):
        spike_location_tau0(-1.0, RmtContext(0.9))


# ---------------------------------------------------------------- lag-tau law


@pytest.mark.parametrize("c", [0.05, 0.3, 0.5, 0.9, 0.999, 1.001, 1.5, 2.0, 4.0, 30.0])
def test_y1_solves_cubic_on_branch(c):
    y1 = solve_y1(c)
    lead = (1 - c) ** 2 - 1
    assert abs(lead * y1**3 + y1**2 + y1 - 1) < 1e-12 * max(1.0, abs(lead) * y1**3)
    assert (y1 > 1) if c < 1 else (0 < y1 < 1)


def test_y1_special_cases():
    assert solve_y1(2.0) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    with pytest.raises(CEqualsOne):
        solve_y1(1.0)
    assert lsd_edge(0.5).y1 == pytest.approx(1.65186, abs=1e-5)


def test_support_values_and_continuity():
    assert lsd_support(RmtContext(0.9)) == pytest.approx(1.8573, abs=1e-4)
    assert lsd_support(RmtContext(0.5)) == pytest.approx(1.24908, abs=1e-5)
    assert lsd_support(RmtContext(1.0)) == 2.0
    for eps in (1e-3, 1e-5):
        assert lsd_support(RmtContext(1 - eps)) == pytest.approx(2.0, abs=5 * eps)
        assert lsd_support(RmtContext(1 + eps)) == pytest.approx(2.0, abs=5 * eps)
    assert lsd_support(RmtContext(0.9, 3.0)) == pytest.approx(3 * 1.8572577, rel=1e-7)


@pytest.mark.parametrize("c", [0.3, 0.9, 1.0, 2.0, 5.0])
def test_density_matches_high_precision_oracle(c):
    a = lsd_edge(c).a
    for x in np.linspace(-0.999 * a, 0.999 * a, 23):
        if abs(x) < 1e-9:
            continue
        assert lsd_density(x, RmtContext(c)) == pytest.approx(textbook_density(x, c), rel=1e-8, abs=1e-12)


def test_density_c_one_closed_value():
    assert lsd_density(1.0, RmtContext(1.0)) == pytest.approx(1 / (2 * math.pi), abs=1e-12)


def test_density_small_x_stable():
    # c != 1: bounded near the origin; evaluation must not blow up
    for c in (0.5, 2.0):
        for x in (1e-3, 1e-6, 1e-9, 1e-200):
            v = lsd_density(x, RmtContext(c))
            assert math.isfinite(v) and v >= 0
    assert lsd_density(1e-3, RmtContext(0.5)) == pytest.approx(textbook_density(1e-3, 0.5, dps=80), rel=1e-7)


def test_density_outside_support_and_scaling():
    ctx = RmtContext(0.7)
    a = lsd_support(ctx)
    assert lsd_density(a * 1.0001, ctx) == 0.0
    assert lsd_density(-a * 2, ctx) == 0.0
    assert lsd_density(0.8 * 2, RmtContext(0.7, 2.0)) == pytest.approx(lsd_density(0.8, ctx) / 2, rel=1e-12)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_second_moment_oracle(c):
    # E tr(M^2)/n = c/2 for M = (X1 X2' + X2 X1')/(2T) with independent N(0,1) blocks
    second = 2 * _half_integral(lambda x: x * x, c, lsd_edge(c).a)
    assert second == pytest.approx(c / 2, abs=1e-9)


@pytest.mark.parametrize("c", [0.5, 0.9, 1.0, 3.0])
def test_cdf_properties(c):
    ctx = RmtContext(c)
    a = lsd_support(ctx)
    assert lsd_cdf(-a, ctx) == 0.0 and lsd_cdf(a, ctx) == 1.0
    xs = np.linspace(-a, a, 41)
    vals = [lsd_cdf(x, ctx) for x in xs]
    assert all(v2 >= v1 - 1e-14 for v1, v2 in zip(vals, vals[1:]))
    # symmetry: F(x) + F(-x) = 1 away from the atom
    for x in (0.2 * a, 0.7 * a):
        assert lsd_cdf(x, ctx) + lsd_cdf(-x, ctx) == pytest.approx(1.0, abs=1e-10)
    atom = max(0.0, 1 - 1 / c)
    assert lsd_cdf(0.0, ctx) == pytest.approx((1 - atom) / 2 + atom, abs=1e-10)


@pytest.mark.parametrize("c", [0.5, 0.9, 2.0])
def test_stieltjes_properties(c):
    ctx = RmtContext(c)
    a = lsd_support(ctx)
    assert lsd_stieltjes(-1.7 * a, ctx) == pytest.approx(-lsd_stieltjes(1.7 * a, ctx), rel=1e-12)
    ell = 1e3
    # m(ell) = -1/ell - E[x^2]/ell^3 + ...
    assert lsd_stieltjes(ell, ctx) == pytest.approx(-1 / ell - (c / 2) / ell**3, rel=1e-9)
    with pytest.raises(InsideSupport):
        lsd_stieltjes(0.5 * a, ctx)
    vals = [lsd_stieltjes(x, ctx) for x in np.linspace(1.01 * a, 6 * a, 30)]
    # m is increasing towards 0 on (a, inf)
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


@pytest.mark.parametrize("c", [0.3, 0.5, 0.9, 2.0, 5.0])
def test_edge_limit_matches_closed_form(c):
    ctx = RmtContext(c)
    assert lsd_stieltjes(lsd_support(ctx), ctx) == pytest.approx(stieltjes_edge_m1(ctx), abs=1e-8)


def test_m1_value():
    assert stieltjes_edge_m1(RmtContext(0.9)) == pytest.approx(-0.7709, abs=1e-4)


def test_stieltjes_sigma_scaling():
    m1 = lsd_stieltjes(3.0, RmtContext(0.9))
    m2 = lsd_stieltjes(6.0, RmtContext(0.9, 2.0))
    assert m2 == pytest.approx(m1 / 2, rel=1e-12)


def test_context_validation():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            RmtContext(bad)
    with pytest.raises(ValueError):
        RmtContext(0.5, 0.0)
    assert RmtContext(1 + 1e-8).near_one


def test_no_quadrature_warning_away_from_one():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        lsd_cdf(0.3, RmtContext(0.9))
        lsd_stieltjes(4.0, RmtContext(2.0))
