"""Limiting spectral laws for symmetrized lag-covariance matrices.

Two families are covered:

* the Marchenko-Pastur (MP) law, the limit of the lag-0 matrix, with its
  Stieltjes transform and the lag-0 spike map;
* the law ``F_c`` of the symmetrized lag-``tau`` noise matrix (``tau >= 1``),
  symmetric on ``[-a, a]`` with a point mass ``1 - 1/c`` at zero when ``c > 1``.

Every law is defined for unit noise variance. Public functions take and return
dimensionful values: arguments are divided by ``sigma2`` before evaluation,
supports and locations are multiplied by ``sigma2``, densities and Stieltjes
transforms are divided by it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from scipy import integrate, optimize

from .cubic import real_cubic_roots
from .exceptions import CEqualsOne, InsideSupport

__all__ = [
    "RmtContext",
    "LsdEdge",
    "C_ONE_WINDOW",
    "mp_edges",
    "mp_stieltjes",
    "mp_companion_stieltjes",
    "g_tau0",
    "spike_location_tau0",
    "solve_y1",
    "lsd_edge",
    "lsd_support",
    "lsd_density",
    "lsd_cdf",
    "lsd_stieltjes",
    "stieltjes_edge_m1",
]

# |c - 1| below this routes to the c = 1 closed forms
C_ONE_WINDOW = 1e-6
# stand-in for |x| -> 0+ in the density formula
_ZERO_X = 1e-8
_QUAD_ABS = 1e-13
_QUAD_REL = 1e-11
# estimated errors above this are surfaced as IntegrationWarning
_QUAD_REPORT = 1e-9


@dataclass(frozen=True)
class RmtContext:
    """Aspect ratio ``c = n / T`` and noise variance ``sigma2``."""

    c: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be positive and finite, got {self.c!r}")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2!r}")

    @property
    def near_one(self) -> bool:
        return abs(self.c - 1.0) < C_ONE_WINDOW


@dataclass(frozen=True)
class LsdEdge:
    y1: float
    a: float


# --------------------------------------------------------------------------
# Marchenko-Pastur law


def mp_edges(ctx: RmtContext) -> tuple[float, float]:
    r = math.sqrt(ctx.c)
    return (1.0 - r) ** 2 * ctx.sigma2, (1.0 + r) ** 2 * ctx.sigma2


def _mp_m_unit(x: float, c: float) -> float:
    left = (1.0 - math.sqrt(c)) ** 2
    right = (1.0 + math.sqrt(c)) ** 2
    if x == 0.0:
        if c < 1.0:
            return 1.0 / (1.0 - c)
        raise InsideSupport("x = 0 carries the MP point mass for c >= 1")
    beta = 1.0 - c - x
    disc = beta * beta - 4.0 * x * c
    if left < x < right:
        raise InsideSupport(f"{x!r} lies inside the MP support [{left!r}, {right!r}]")
    # at the edges disc vanishes up to rounding
    disc = max(disc, 0.0)
    s = math.sqrt(disc)
    # the two roots multiply to 1/(c x); evaluate the cancellation-free one
    if x >= right:
        return 2.0 / (beta - s)
    return 2.0 / (beta + s)


def mp_stieltjes(ell: float, ctx: RmtContext) -> float:
    """Stieltjes transform ``m(ell) = int dF(x) / (x - ell)`` of the MP law.

    The branch is the one with ``m(ell) ~ -1/ell`` at infinity. The support
    edges themselves are admitted (the transform is finite there).

    Raises
    ------
    InsideSupport
        ``ell`` lies strictly inside the support.
    """
    x = ell / ctx.sigma2
    return _mp_m_unit(x, ctx.c) / ctx.sigma2


def mp_companion_stieltjes(ell: float, ctx: RmtContext) -> float:
    """Companion transform ``-(1 - c)/ell + c m(ell)`` (law of the ``T x T`` Gram matrix)."""
    c = ctx.c
    return -(1.0 - c) / ell + c * mp_stieltjes(ell, ctx)


def _g_tau0_unit(x: float, c: float) -> float:
    return -x * _mp_m_unit(x, c) - 1.0


def g_tau0(ell: float, ctx: RmtContext) -> float:
    """Lag-0 spike map ``ell m(ell) m_companion(ell) = -ell m(ell) - 1``.

    Dimensionless; strictly decreasing from ``1/sqrt(c)`` at the right MP edge
    to ``0`` at infinity.
    """
    x = ell / ctx.sigma2
    right = (1.0 + math.sqrt(ctx.c)) ** 2
    if x < right:
        raise InsideSupport(f"g_tau0 needs ell >= {right * ctx.sigma2!r}, got {ell!r}")
    return _g_tau0_unit(x, ctx.c)


def spike_location_tau0(alpha: float, ctx: RmtContext):
    """Almost-sure limit of the lag-0 sample eigenvalue produced by a spike ``alpha``.

    ``alpha`` is an eigenvalue of the loading Gram matrix in units of ``sigma2``.
    Returns ``None`` when ``alpha <= sqrt(c)`` (no outlier); otherwise the unique
    ``ell`` above the right MP edge with ``g_tau0(ell) = 1/alpha``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    c = ctx.c
    if alpha <= math.sqrt(c):
        return None
    target = 1.0 / alpha
    lo = (1.0 + math.sqrt(c)) ** 2
    hi = 2.0 * lo
    while _g_tau0_unit(hi, c) > target:
        hi *= 2.0
    x = optimize.bisect(
        lambda t: _g_tau0_unit(t, c) - target, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=400
    )
    return x * ctx.sigma2


# --------------------------------------------------------------------------
# law of the symmetrized lag-tau noise matrix


def solve_y1(c: float) -> float:
    """Root of ``((1-c)^2 - 1) y^3 + y^2 + y - 1 = 0`` in the branch that fixes the edge.

    ``y1 > 1`` for ``c < 1`` and ``0 < y1 < 1`` for ``c > 1``.
    """
    if abs(c - 1.0) < C_ONE_WINDOW:
        raise CEqualsOne("the edge cubic degenerates at c = 1; use the c = 1 closed form")
    lead = (1.0 - c) ** 2 - 1.0
    if abs(lead) < 1e-14:
        # c = 2: the cubic drops to y^2 + y - 1
        return (math.sqrt(5.0) - 1.0) / 2.0
    roots = real_cubic_roots(lead, 1.0, 1.0, -1.0)
    if c < 1.0:
        picks = [y for y in roots if y > 1.0]
    else:
        picks = [y for y in roots if 0.0 < y < 1.0]
    if len(picks) != 1:
        raise ArithmeticError(f"no unique branch root of the edge cubic at c={c!r}: {roots}")
    return picks[0]


@lru_cache(maxsize=256)
def _edge_unit(c: float) -> LsdEdge:
    if abs(c - 1.0) < C_ONE_WINDOW:
        return LsdEdge(1.0, 2.0)
    y1 = solve_y1(c)
    return LsdEdge(y1, (1.0 - c) * math.sqrt(1.0 + y1) / (y1 - 1.0))


def lsd_edge(c: float) -> LsdEdge:
    """``y1`` and the unit-variance half-width ``a`` of the support of ``F_c``."""
    return _edge_unit(float(c))


def lsd_support(ctx: RmtContext) -> float:
    """Half-width of the support of ``F_c`` scaled by ``sigma2``."""
    return _edge_unit(float(ctx.c)).a * ctx.sigma2


def _y0(x: float, c: float) -> float:
    # x^2 y^3 - ((1-c)^2 - x^2) y^2 - 4 y - 4 = 0, the density cubic cleared of 1/x^2
    return real_cubic_roots(x * x, -((1.0 - c) ** 2 - x * x), -4.0, -4.0)[-1]


def _density_unit(x: float, c: float) -> float:
    a = _edge_unit(c).a
    ax = abs(x)
    if ax > a:
        return 0.0
    if ax == 0.0:
        # x = 0 itself: use the one-sided limit
        ax = _ZERO_X
    elif ax < 1e-100:
        # keeps the cubic coefficients representable
        ax = 1e-100
    y0 = _y0(ax, c)
    # With u = 1/(1 + y0) the cubic reads (1 - u)^2 (x^2 - (1-c)^2 u) = 4 u^2, which
    # turns y0^2/(1+y0) - ((1-c)/|x| + sqrt(u))^2 into the form below. The
    # textbook form cancels two O((1-c)^2/x^2) terms near the origin.
    u = 1.0 / (1.0 + y0)
    rad = 4.0 * u / (ax * ax * (1.0 - u) ** 2) - 2.0 * (1.0 - c) * math.sqrt(u) / ax - 2.0
    if rad <= 0.0:
        return 0.0
    return math.sqrt(rad) / (2.0 * c * math.pi)


def lsd_density(x: float, ctx: RmtContext) -> float:
    """Density of the continuous part of ``F_c`` (zero outside ``[-a, a]``).

    At ``x = 0`` the value is the limit from ``|x| -> 0+``; the atom at the
    origin for ``c > 1`` is not part of the density.
    """
    return _density_unit(x / ctx.sigma2, float(ctx.c)) / ctx.sigma2


def _continuous_mass(c: float) -> float:
    return 1.0 if c <= 1.0 else 1.0 / c


def _half_integral(weight, c: float, x_max: float) -> float:
    """``int_0^x_max density(x) weight(x) dx`` in unit-variance coordinates.

    Substituting ``x = a sin(pi v^2 / 2)`` makes the integrand bounded both at
    the support edge (square-root decay) and at the origin (the density grows
    like ``|x|^(-1/2)`` when ``c`` is close to 1).
    """
    a = _edge_unit(c).a
    if x_max <= 0.0:
        return 0.0
    v_max = math.sqrt(2.0 / math.pi * math.asin(min(1.0, x_max / a)))

    def fun(v):
        th = 0.5 * math.pi * v * v
        x = a * math.sin(th)
        w = weight(x)
        if w == 0.0:
            return 0.0
        return _density_unit(x, c) * w * a * math.cos(th) * math.pi * v

    # near c = 1 the density changes regime at |x| ~ (1-c)^2 and |x| ~ |1-c|
    k = abs(1.0 - c)
    xs = [x for x in (k * k, k, 10.0 * k) if 0.0 < x < a]
    pts = {math.sqrt(2.0 / math.pi * math.asin(x / a)) for x in xs}
    pts.update((1e-3, 1e-2, 0.1))
    pts = sorted(p for p in pts if 0.0 < p < v_max) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            fun, 0.0, v_max, points=pts, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=500
        )
    if err > _QUAD_REPORT:
        warnings.warn(
            f"quadrature error estimate {err:.2e} exceeds {_QUAD_REPORT:.0e} (c={c!r})",
            integrate.IntegrationWarning,
            stacklevel=3,
        )
    return val


def _cdf_unit(x: float, c: float) -> float:
    a = _edge_unit(c).a
    mass = _continuous_mass(c)
    atom = 1.0 - mass
    if x <= -a:
        return 0.0
    if x >= a:
        return 1.0
    half = _half_integral(lambda t: 1.0, c, abs(x))
    if x < 0.0:
        val = 0.5 * mass - half
    else:
        val = 0.5 * mass + half + atom
    return min(1.0, max(0.0, val))


def lsd_cdf(x: float, ctx: RmtContext) -> float:
    """Distribution function of ``F_c``, including the origin atom when ``c > 1``."""
    return _cdf_unit(x / ctx.sigma2, float(ctx.c))


def _stieltjes_unit(u: float, c: float) -> float:
    a = _edge_unit(c).a
    if abs(u) < a:
        raise InsideSupport(f"{u!r} lies inside the support [-{a!r}, {a!r}]")
    if u < 0.0:
        return -_stieltjes_unit(-u, c)

    def weight(x):
        # 1/(x - u) + 1/(-x - u) = 2u/(x^2 - u^2), folding the symmetric law onto [0, a]
        if x >= u:
            # only reachable at the edge itself, where the density vanishes
            return 0.0
        return 2.0 * u / ((x - u) * (x + u))

    val = _half_integral(weight, c, a)
    if c > 1.0:
        val += (1.0 - 1.0 / c) / (0.0 - u)
    return val


def lsd_stieltjes(ell: float, ctx: RmtContext) -> float:
    """Stieltjes transform of ``F_c`` on the real axis outside ``(-a, a)``, by quadrature.

    The support edges are admitted; there the integral converges to the edge
    limit.
    """
    return _stieltjes_unit(ell / ctx.sigma2, float(ctx.c)) / ctx.sigma2


def _m1_unit(c: float) -> float:
    d = _edge_unit(c).a
    return (1.0 - c - math.sqrt((1.0 - c) ** 2 + 8.0 * d * d)) / (4.0 * c * d)


def stieltjes_edge_m1(ctx: RmtContext) -> float:
    """Closed-form limit of ``lsd_stieltjes`` as ``ell`` decreases to the right edge."""
    return _m1_unit(float(ctx.c)) / ctx.sigma2
