"""Forward model for outliers of the lag-tau matrices.

For ``tau >= 1`` each eigenvalue ``a_j`` of the band matrix ``H(tau)``, paired
with an eigenvalue ``lambda_j`` of the loading Gram matrix ``Q``, produces zero,
one or two sample eigenvalues outside ``[-d, d]``. They are the solutions of
``g_j(ell) = a_j`` where

    g_j(ell) = (1/2 + 1/h)^(-1) * [ (c m / h) (1 + 1/lambda_j) + ell / lambda_j ],
    h(ell) = 1 - c^2 m^2 + sqrt(1 - c^2 m^2),

and ``m`` is the Stieltjes transform of the lag-tau noise law. ``g_j`` is odd
and increasing on each side of the support, so the number of solutions only
depends on where ``a_j`` sits relative to ``+-g_j(d+)``.

``ell`` and returned roots are in data units (``ctx.sigma2`` is divided out
before evaluation); ``lambda_j`` and ``a_j`` are dimensionless, ``lambda_j``
being measured relative to the noise level.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import NonPositiveLambda
from .rmt import RmtContext, _edge_unit, _m1_unit, _stieltjes_unit

__all__ = [
    "BandMatrixH",
    "SpikeCase",
    "SpikePrediction",
    "build_H",
    "h_eigenvalues",
    "g_j_eval",
    "g_infinity_threshold",
    "classify_spike",
    "solve_spike_tau",
    "predict_outlier_counts",
]

SNAP = 1e-10
# beyond d * BRACKET_FACTOR a root is reported as infinite (counted, not located)
BRACKET_FACTOR = 1e6


@dataclass(frozen=True)
class BandMatrixH:
    """The ``k(q+1)`` square 0/1 matrix with unit blocks at block distance ``tau``."""

    k: int
    q: int
    tau: int
    matrix: np.ndarray


@dataclass(frozen=True)
class SpikeCase:
    a_j: float
    lambda_j: float
    g_edge: float
    solutions_right: int
    solutions_left: int
    case_label: str

    @property
    def count(self) -> int:
        return self.solutions_right + self.solutions_left

    def as_dict(self) -> dict:
        lam = "inf" if math.isinf(self.lambda_j) else self.lambda_j
        return {
            "a_j": self.a_j,
            "lambda_j": lam,
            "g_edge": self.g_edge,
            "right": self.solutions_right,
            "left": self.solutions_left,
            "case": self.case_label,
        }


@dataclass(frozen=True)
class SpikePrediction:
    k: int
    q: int
    tau: int
    total_count: int
    cases: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "count": self.total_count,
            "cases": [sc.as_dict() for sc in self.cases],
        }


def _shift_block(q: int, tau: int) -> np.ndarray:
    """``J_L(tau) + J_U(tau)`` of size ``q + 1``."""
    size = q + 1
    j = np.zeros((size, size))
    if tau <= q:
        idx = np.arange(size - tau)
        j[idx + tau, idx] = 1.0
        j[idx, idx + tau] = 1.0
    return j


def build_H(k: int, q: int, tau: int) -> BandMatrixH:
    if k < 1 or q < 0 or tau < 1:
        raise ValueError("need k >= 1, q >= 0, tau >= 1")
    mat = np.kron(_shift_block(q, tau), np.eye(k))
    return BandMatrixH(k, q, tau, mat)


def h_eigenvalues(H: BandMatrixH) -> np.ndarray:
    """Eigenvalues of ``H(tau)``, descending, snapped to a ``1e-10`` grid."""
    ev = np.linalg.eigvalsh(H.matrix)
    ev = np.round(ev / SNAP) * SNAP
    ev[ev == 0.0] = 0.0  # no negative zeros in the multiset
    return np.sort(ev)[::-1]


def _inv_lambda(lambda_j) -> float:
    lam = float(lambda_j)
    if not lam > 0.0:
        raise NonPositiveLambda(f"lambda_j must be positive, got {lambda_j!r}")
    return 0.0 if math.isinf(lam) else 1.0 / lam


def _g_from_m(x: float, m: float, c: float, inv_lam: float) -> float:
    cm = c * m
    r = 1.0 - cm * cm
    if r < 0.0:
        raise ArithmeticError(f"1 - c^2 m^2 < 0 at ell={x!r}, c={c!r}")
    h = r + math.sqrt(r)
    return (cm / h * (1.0 + inv_lam) + x * inv_lam) / (0.5 + 1.0 / h)


def _g_unit(x: float, c: float, inv_lam: float) -> float:
    return _g_from_m(x, _stieltjes_unit(x, c), c, inv_lam)


def _g_edge_unit(c: float, inv_lam: float) -> float:
    d = _edge_unit(c).a
    return _g_from_m(d, _m1_unit(c), c, inv_lam)


def g_j_eval(ell: float, lambda_j, ctx: RmtContext) -> float:
    """Right-hand side of the lag-tau spike equation at ``ell``.

    ``lambda_j`` may be ``math.inf`` (strong factors). Raises
    :class:`InsideSupport` for ``|ell| < d``.
    """
    inv_lam = _inv_lambda(lambda_j)
    x = ell / ctx.sigma2
    return _g_unit(x, float(ctx.c), inv_lam)


def g_infinity_threshold(ctx: RmtContext) -> float:
    """``g_j(d+)`` for ``lambda_j = inf``, the case threshold under strong factors."""
    return _g_edge_unit(float(ctx.c), 0.0)


def classify_spike(a_j: float, lambda_j, ctx: RmtContext) -> SpikeCase:
    g_d = _g_edge_unit(float(ctx.c), _inv_lambda(lambda_j))
    a = float(a_j)
    if g_d >= 0.0:
        if a > g_d:
            right, left, label = 1, 0, "I.i"
        elif a >= -g_d:
            right, left, label = 0, 0, "I.ii"
        else:
            right, left, label = 0, 1, "I.iii"
    else:
        if a >= -g_d:
            right, left, label = 1, 0, "II.i"
        elif a > g_d:
            right, left, label = 1, 1, "II.ii"
        else:
            right, left, label = 0, 1, "II.iii"
    return SpikeCase(a, float(lambda_j), g_d, right, left, label)


def _root_right(a: float, c: float, inv_lam: float) -> float:
    d = _edge_unit(c).a
    f_lo = _g_edge_unit(c, inv_lam) - a
    hi = d * BRACKET_FACTOR
    f_hi = _g_unit(hi, c, inv_lam) - a
    if f_lo > 0.0 or f_hi < 0.0:
        return math.inf
    if f_lo == 0.0:
        return d

    def f(x):
        return (_g_edge_unit(c, inv_lam) if x == d else _g_unit(x, c, inv_lam)) - a

    return optimize.brentq(f, d, hi, xtol=1e-14 * d, rtol=1e-13, maxiter=500)


def solve_spike_tau(a_j: float, lambda_j, ctx: RmtContext) -> list[float]:
    """Every ``ell`` with ``|ell| > d`` solving ``g_j(ell) = a_j``, ascending.

    Roots are located by bracketing on ``(d, 1e6 d)`` and its mirror image,
    using that ``g_j`` is increasing and odd. A root the classification
    promises but that lies beyond the bracket is returned as ``+-inf``.
    """
    c = float(ctx.c)
    inv_lam = _inv_lambda(lambda_j)
    if inv_lam == 0.0:
        raise ValueError("solve_spike_tau needs a finite lambda_j; use classify_spike for inf")
    case = classify_spike(a_j, lambda_j, ctx)
    roots = []
    if case.solutions_left:
        # g is odd: g(-x) = a  <=>  g(x) = -a
        roots.append(-_root_right(-float(a_j), c, inv_lam) * ctx.sigma2)
    if case.solutions_right:
        roots.append(_root_right(float(a_j), c, inv_lam) * ctx.sigma2)
    return roots


def _lambda_list(lambdas, size: int) -> list[float]:
    if lambdas is None:
        return [math.inf] * size
    if np.isscalar(lambdas):
        return [float(lambdas)] * size
    lam = [float(v) for v in lambdas]
    if len(lam) != size:
        raise ValueError(f"expected {size} lambda values, got {len(lam)}")
    return lam


def predict_outlier_counts(
    k: int,
    q: int,
    tau_max: int,
    ctx: RmtContext,
    lambdas: float | Sequence[float] | None = math.inf,
) -> list[SpikePrediction]:
    """Predicted number of outliers of the lag-``tau`` matrix for ``tau = 0..tau_max``.

    ``lambdas`` are the ``k(q+1)`` eigenvalues of ``Q`` in units of ``sigma2``
    (a scalar applies to all, ``inf`` means strong factors). For ``tau >= 1``
    the j-th largest eigenvalue of ``H(tau)`` is paired with ``lambdas[j]``;
    this is the commuting case.
    """
    if k < 1 or q < 0:
        raise ValueError("need k >= 1 and q >= 0")
    size = k * (q + 1)
    lam = _lambda_list(lambdas, size)
    if any(not v > 0.0 for v in lam):
        raise NonPositiveLambda("lambda values must be positive")
    root_c = math.sqrt(ctx.c)
    out = [SpikePrediction(k, q, 0, sum(1 for v in lam if v > root_c))]
    for tau in range(1, int(tau_max) + 1):
        a_vals = h_eigenvalues(build_H(k, q, tau))
        cases = [classify_spike(a, l, ctx) for a, l in zip(a_vals, lam)]
        out.append(SpikePrediction(k, q, tau, sum(sc.count for sc in cases), cases))
    return out
