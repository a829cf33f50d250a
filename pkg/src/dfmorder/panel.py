"""Panels, symmetrized lag-covariance matrices and their spectra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ConvergenceFailure,
    EmptyInput,
    InsufficientColumns,
    NonFinite,
    RaggedRows,
)

__all__ = [
    "Panel",
    "SymLagCov",
    "Spectrum",
    "validate_panel",
    "build_sym_lag_cov",
    "eigenvalues_sym",
    "lag_spectra",
]


@dataclass(frozen=True)
class Panel:
    """An ``n x N`` observation matrix, one row per series, one column per period."""

    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]

    def scaled(self, s: float) -> "Panel":
        return Panel(self.data * s)


@dataclass(frozen=True)
class SymLagCov:
    matrix: np.ndarray
    tau: int
    t_used: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Full real spectrum of a symmetrized lag-covariance matrix.

    ``eigenvalues`` is sorted descending by value and ``abs_sorted`` holds the
    same values sorted descending by magnitude.
    """

    eigenvalues: np.ndarray
    tau: int
    n: int
    t_used: int
    abs_sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.shape != (self.n,):
            raise ValueError(f"expected {self.n} eigenvalues, got shape {ev.shape}")
        ev = np.sort(ev)[::-1]
        object.__setattr__(self, "eigenvalues", ev)
        order = np.argsort(-np.abs(ev), kind="stable")
        object.__setattr__(self, "abs_sorted", np.abs(ev[order]))

    @property
    def c(self) -> float:
        return self.n / self.t_used

    def scaled(self, s: float) -> "Spectrum":
        return Spectrum(self.eigenvalues * s, self.tau, self.n, self.t_used)


def validate_panel(raw) -> Panel:
    """Check that ``raw`` is a nonempty rectangular finite real matrix.

    Raises
    ------
    EmptyInput
        No rows or no columns.
    RaggedRows
        Rows of unequal length (only possible for nested-list input).
    NonFinite
        One or more NaN/inf cells; every offending ``(row, col)`` is listed.
    """
    if isinstance(raw, Panel):
        raw = raw.data
    if not isinstance(raw, np.ndarray):
        rows = list(raw)
        if not rows:
            raise EmptyInput("panel has no rows")
        if np.ndim(rows[0]) == 0:
            # a flat sequence is a single series
            rows = [rows]
        widths = [len(r) for r in rows]
        for i, w in enumerate(widths):
            if w != widths[0]:
                raise RaggedRows(i, widths[0], w)
        raw = np.asarray(rows, dtype=float)
    data = np.array(raw, dtype=float, copy=True)
    if data.ndim == 1 and data.size:
        data = data[np.newaxis, :]
    if data.ndim != 2:
        raise EmptyInput(f"panel must be two-dimensional, got ndim={data.ndim}")
    if data.shape[0] == 0 or data.shape[1] == 0:
        raise EmptyInput(f"panel has shape {data.shape}")
    bad = ~np.isfinite(data)
    if bad.any():
        raise NonFinite([tuple(int(v) for v in rc) for rc in np.argwhere(bad)])
    data.setflags(write=False)
    return Panel(data)


def build_sym_lag_cov(panel: Panel, tau: int, t_used: int) -> SymLagCov:
    """Symmetrized lag-``tau`` auto-cross covariance over the first ``t_used`` periods.

    ``matrix[a, b] = (1 / (2 T)) * sum_j (R[a, j] R[b, j + tau] + R[a, j + tau] R[b, j])``.
    """
    tau = int(tau)
    t_used = int(t_used)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if t_used < 1:
        raise ValueError("t_used must be positive")
    if t_used + tau > panel.N:
        raise InsufficientColumns(
            f"t_used + tau = {t_used + tau} exceeds the {panel.N} available columns"
        )
    x = panel.data
    s = x[:, :t_used] @ x[:, tau : tau + t_used].T
    # s + s.T is exactly symmetric: float addition commutes
    mat = (s + s.T) / (2.0 * t_used)
    return SymLagCov(mat, tau, t_used)


def eigenvalues_sym(cov: SymLagCov) -> Spectrum:
    try:
        ev = np.linalg.eigvalsh(cov.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise ConvergenceFailure("eigensolver returned non-finite values")
    return Spectrum(ev, cov.tau, cov.n, cov.t_used)


def lag_spectra(panel: Panel, tau_max: int) -> list[Spectrum]:
    """Spectra for lags ``0..tau_max`` sharing ``T = N - tau_max`` so ``c`` is fixed."""
    t_used = panel.N - int(tau_max)
    if t_used < 1:
        raise InsufficientColumns(
            f"tau_max={tau_max} leaves no usable periods out of {panel.N}"
        )
    return [
        eigenvalues_sym(build_sym_lag_cov(panel, tau, t_used))
        for tau in range(int(tau_max) + 1)
    ]
