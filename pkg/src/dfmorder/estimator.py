"""Order determination for dynamic factor models from lag-covariance spectra.

The pipeline counts eigenvalues of the lag-0 matrix above the buffered MP edge
(``s0 = k(q+1)`` under strong factors) and then, for ``tau = 1, 2, ...``, the
eigenvalues of the lag-``tau`` matrix outside the buffered support of the
lag-``tau`` noise law. The count first reaches ``2 s0`` at ``tau = q + 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import AspectRatioOne, EmptyWindow
from .panel import Panel, Spectrum, lag_spectra, validate_panel
from .rmt import C_ONE_WINDOW, RmtContext, lsd_support

__all__ = [
    "ThresholdSet",
    "OrderEstimate",
    "NonConvergenceWarning",
    "threshold_tau0",
    "threshold_tau_pos",
    "count_outliers",
    "estimate_noise_variance",
    "estimate_orders",
    "decide_orders",
    "FactorOrderEstimator",
]

MAX_SIGMA2_ITER = 100
ZERO_FLOOR = 1e-10


class NonConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ThresholdSet:
    b_hat: float
    d_hat: float
    c: float
    n: int
    sigma2_used: float

    def as_dict(self) -> dict:
        return {"b_hat": self.b_hat, "d_hat": self.d_hat}


@dataclass(frozen=True)
class OrderEstimate:
    """Result of :func:`estimate_orders`.

    ``k_hat`` and ``q_hat`` are ``None`` when no lag reached ``2 * s0``
    (an ``IncreaseTauMax`` warning is then present).
    """

    k_hat: int | None
    q_hat: int | None
    s0: int
    counts: list
    sigma2_hat: float
    thresholds: ThresholdSet
    warnings: list = field(default_factory=list)
    sigma2_source: str = "given"
    sigma2_iterations: int = 0
    spectra: list = field(default_factory=list, repr=False, compare=False)


def _buffer_tau0(n: int) -> float:
    return 1.0 + 2.0 * n ** (-2.0 / 3.0)


def _buffer_tau_pos(n: int) -> float:
    return 1.0 + 0.1 * n ** (-1.0 / 3.0)


def threshold_tau0(ctx: RmtContext, n: int) -> float:
    """``(1 + sqrt(c))^2 (1 + 2 n^(-2/3)) sigma2``."""
    if n < 1:
        raise ValueError("n must be positive")
    return (1.0 + math.sqrt(ctx.c)) ** 2 * _buffer_tau0(n) * ctx.sigma2


def threshold_tau_pos(ctx: RmtContext, n: int) -> float:
    """Right edge of the lag-tau noise law times ``1 + 0.1 n^(-1/3)``."""
    if n < 1:
        raise ValueError("n must be positive")
    return lsd_support(ctx) * _buffer_tau_pos(n)


def count_outliers(spec: Spectrum, threshold: float, use_abs: bool) -> int:
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    ev = np.abs(spec.eigenvalues) if use_abs else spec.eigenvalues
    return int(np.count_nonzero(ev > threshold))


def _noise_variance(spec0: Spectrum):
    c = spec0.c
    if abs(c - 1.0) < C_ONE_WINDOW:
        raise AspectRatioOne("c = 1 collapses the noise-variance window; supply sigma2")
    n = spec0.n
    ev = np.sort(spec0.eigenvalues)
    top = ev[-1]
    if not top > 0.0:
        raise EmptyWindow("lag-0 spectrum has no positive eigenvalue")
    floor = ZERO_FLOOR * top
    # for c > 1 the n - T structural zeros are dropped; the remaining
    # eigenvalues average to c * sigma2, hence the division by c
    if c > 1.0:
        ev = ev[ev > floor]
        scale = c
    else:
        scale = 1.0
    positive = ev[ev > floor]
    lam1 = positive[0]
    lo_f = (1.0 - math.sqrt(c)) ** 2
    hi_f = (1.0 + math.sqrt(c)) ** 2 * _buffer_tau0(n)
    m = int(np.count_nonzero(ev >= hi_f / lo_f * lam1))
    core = ev[m : ev.size - m]
    if core.size == 0:
        raise EmptyWindow("rank trimming removed every eigenvalue")
    sigma2 = float(core.mean()) / scale
    prev = None
    for it in range(1, MAX_SIGMA2_ITER + 1):
        mask = (ev >= lo_f * sigma2) & (ev <= hi_f * sigma2)
        if not mask.any():
            raise EmptyWindow(f"no eigenvalue in the noise window at iteration {it}")
        if prev is not None and np.array_equal(mask, prev):
            return sigma2, it - 1, True
        sigma2 = float(ev[mask].mean()) / scale
        prev = mask
    return sigma2, MAX_SIGMA2_ITER, False


def estimate_noise_variance(spec0: Spectrum) -> tuple[float, int]:
    """Iterative noise-variance estimate from the lag-0 spectrum.

    Starts from the rank-trimmed mean and repeatedly averages the eigenvalues
    inside ``[(1 - sqrt c)^2 s, (1 + sqrt c)^2 (1 + 2 n^(-2/3)) s]`` until the
    included set stops changing. Emits :class:`NonConvergenceWarning` after
    100 iterations without a fixed point.

    Returns
    -------
    sigma2_hat, iterations
    """
    sigma2, iters, converged = _noise_variance(spec0)
    if not converged:
        warnings.warn(
            f"noise-variance iteration did not reach a fixed point in {iters} steps",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return sigma2, iters


def estimate_orders(panel, tau_max: int, sigma2: float | None = None) -> OrderEstimate:
    """Estimate the number of factors ``k`` and lags ``q``.

    Parameters
    ----------
    panel : Panel or array-like, shape (n_series, n_periods)
    tau_max : int
        Largest lag examined; all lags share ``T = N - tau_max`` periods.
    sigma2 : float, optional
        Noise variance; estimated from the lag-0 spectrum when omitted.
    """
    tau_max = int(tau_max)
    if tau_max < 1:
        raise ValueError("tau_max must be at least 1")
    if not isinstance(panel, Panel):
        panel = validate_panel(panel)
    if panel.N <= tau_max + 1:
        raise ValueError(f"need more than tau_max + 1 = {tau_max + 1} periods, got {panel.N}")
    spectra = lag_spectra(panel, tau_max)
    notes = []
    if sigma2 is None:
        s2, iters, converged = _noise_variance(spectra[0])
        source = "estimated"
        if not converged:
            notes.append(f"NonConvergence: noise-variance iteration stopped after {iters} steps")
    else:
        s2, iters, source = float(sigma2), 0, "given"
        if not s2 > 0:
            raise ValueError("sigma2 must be positive")
    n = panel.n
    ctx = RmtContext(spectra[0].c, s2)
    thr = ThresholdSet(threshold_tau0(ctx, n), threshold_tau_pos(ctx, n), ctx.c, n, s2)
    s0 = count_outliers(spectra[0], thr.b_hat, use_abs=False)
    counts = [(0, s0)] + [
        (spec.tau, count_outliers(spec, thr.d_hat, use_abs=True)) for spec in spectra[1:]
    ]

    k_hat, q_hat, notes_decide = decide_orders(s0, counts, tau_max)
    notes.extend(notes_decide)
    return OrderEstimate(k_hat, q_hat, s0, counts, s2, thr, notes, source, iters, spectra)


def decide_orders(s0: int, counts, tau_max: int | None = None):
    """Decision rule on the per-lag outlier counts.

    ``q + 1`` is the first lag whose count reaches ``2 * s0`` and
    ``k = s0 / (q + 1)``. Returns ``(k_hat, q_hat, warnings)``; both orders
    are ``None`` when no lag reaches ``2 * s0``.
    """
    if s0 == 0:
        return 0, 0, ["NoFactors: no lag-0 eigenvalue exceeds the threshold"]
    jump = next((tau for tau, cnt in counts if tau >= 1 and cnt >= 2 * s0), None)
    if jump is None:
        top = tau_max if tau_max is not None else max(tau for tau, _ in counts)
        return None, None, [f"IncreaseTauMax: no lag up to {top} reached {2 * s0} outliers"]
    if s0 % jump:
        k_hat = int(math.floor(s0 / jump + 0.5))
        return k_hat, jump - 1, [f"Divisibility: s0={s0} is not a multiple of q_hat+1={jump}"]
    return s0 // jump, jump - 1, []


class FactorOrderEstimator(BaseEstimator):
    """Scikit-learn style wrapper around :func:`estimate_orders`.

    Parameters
    ----------
    tau_max : int, default=5
        Largest lag examined.
    sigma2 : float or None, default=None
        Known noise variance. ``None`` estimates it from the data.

    Attributes
    ----------
    k_, q_ : int or None
        Estimated number of factors and lags.
    sigma2_ : float
    counts_ : ndarray of shape (tau_max + 1,)
        Outlier counts per lag.
    thresholds_ : ThresholdSet
    warnings_ : list of str
    estimate_ : OrderEstimate

    Notes
    -----
    ``X`` follows the scikit-learn layout, one row per period and one column
    per series, and is transposed internally.
    """

    def __init__(self, tau_max=5, sigma2=None):
        self.tau_max = tau_max
        self.sigma2 = sigma2

    def fit(self, X, y=None):
        panel = validate_panel(np.asarray(X, dtype=float).T)
        est = estimate_orders(panel, self.tau_max, self.sigma2)
        self.estimate_ = est
        self.k_ = est.k_hat
        self.q_ = est.q_hat
        self.sigma2_ = est.sigma2_hat
        self.counts_ = np.array([cnt for _, cnt in est.counts])
        self.thresholds_ = est.thresholds
        self.warnings_ = list(est.warnings)
        self.n_features_in_ = panel.n
        return self

    def get_orders(self):
        check_is_fitted(self, "estimate_")
        return self.k_, self.q_
