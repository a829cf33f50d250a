"""Seeded simulation of the dynamic factor model and Monte Carlo helpers.

The model is

    R_t = sum_{i=0}^{q} Lambda_i f_{t-i} + e_t,

with ``Lambda_i = beta * 1 + N(0, sigma_eps2)`` entries, ``f_t ~ N(0, sigma_f2 I_k)``
and ``e_t ~ N(0, sigma2 I_n)``. The ``q`` pre-sample factors ``f_0, ..., f_{1-q}``
are drawn as well so every column follows the same law.

Random numbers come from numpy's ``PCG64`` seeded through ``SeedSequence``.
Replicate ``r`` of root seed ``s`` uses ``SeedSequence(s, spawn_key=(r,))`` and
loadings, factors and noise each get their own child stream, so outputs do
not depend on evaluation order or on the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimator import OrderEstimate, estimate_orders
from .panel import Panel, Spectrum
from .rmt import RmtContext, lsd_cdf

__all__ = [
    "GENERATOR",
    "ModelConfig",
    "child_seed",
    "generate_loadings",
    "generate_panel",
    "loading_gram_eigenvalues",
    "esd_ks_distance",
    "run_replicates",
]

# bump when the sampling algorithm changes; acceptance numbers depend on it
GENERATOR = "pcg64-seedsequence-v1"
THREADS_ENV = "FACTOR_ORDER_THREADS"

_LOADINGS, _FACTORS, _NOISE = 0, 1, 2


@dataclass(frozen=True)
class ModelConfig:
    n: int = 450
    T: int = 500
    k: int = 2
    q: int = 2
    beta: float = 1.0
    sigma_f2: float = 4.0
    sigma2: float = 1.0
    sigma_eps2: float = 0.25
    seed: int = 0
    tau_max: int = 5

    def __post_init__(self):
        if self.n < 1 or self.T < 1 or self.k < 1 or self.q < 0 or self.tau_max < 0:
            raise ValueError("need n, T, k >= 1 and q, tau_max >= 0")
        if self.sigma2 <= 0 or self.sigma_f2 < 0 or self.sigma_eps2 < 0:
            raise ValueError("variances must be nonnegative (sigma2 positive)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def child_seed(seed: int, replicate: int | None = None) -> np.random.SeedSequence:
    if replicate is None:
        return np.random.SeedSequence(int(seed))
    return np.random.SeedSequence(int(seed), spawn_key=(int(replicate),))


def _stream(root: np.random.SeedSequence, which: int) -> np.random.Generator:
    ss = np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + (which,))
    return np.random.Generator(np.random.PCG64(ss))


def generate_loadings(cfg: ModelConfig, replicate: int | None = None) -> list[np.ndarray]:
    """``q + 1`` loading matrices of shape ``(n, k)``."""
    rng = _stream(child_seed(cfg.seed, replicate), _LOADINGS)
    sd = math.sqrt(cfg.sigma_eps2)
    return [cfg.beta + sd * rng.standard_normal((cfg.n, cfg.k)) for _ in range(cfg.q + 1)]


def loading_gram_eigenvalues(loadings) -> np.ndarray:
    """Eigenvalues of ``Q = Lambda^T Lambda`` with ``Lambda = [Lambda_0 ... Lambda_q]``, descending."""
    lam = np.hstack(loadings)
    return np.linalg.eigvalsh(lam.T @ lam)[::-1]


def generate_panel(cfg: ModelConfig, replicate: int | None = None) -> Panel:
    """Simulated panel with ``n`` rows and ``T + tau_max`` columns."""
    root = child_seed(cfg.seed, replicate)
    loadings = generate_loadings(cfg, replicate)
    n_cols = cfg.T + cfg.tau_max
    f_rng = _stream(root, _FACTORS)
    e_rng = _stream(root, _NOISE)
    # column j of f is period j - q + 1, so lag i of period t sits at column t + q - i
    f = math.sqrt(cfg.sigma_f2) * f_rng.standard_normal((cfg.k, n_cols + cfg.q))
    data = math.sqrt(cfg.sigma2) * e_rng.standard_normal((cfg.n, n_cols))
    for i, lam in enumerate(loadings):
        data += lam @ f[:, cfg.q - i : cfg.q - i + n_cols]
    data.setflags(write=False)
    return Panel(data)


def esd_ks_distance(spec: Spectrum, ctx: RmtContext) -> float:
    """Kolmogorov distance between the empirical spectral CDF and the lag-tau law."""
    ev = np.sort(spec.eigenvalues)
    p = ev.size
    lsd = np.array([lsd_cdf(float(x), ctx) for x in ev])
    upper = np.arange(1, p + 1) / p
    lower = np.arange(p) / p
    return float(min(1.0, max(np.max(upper - lsd), np.max(lsd - lower))))


def _thread_count(n_jobs) -> int:
    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    n_jobs = max(1, int(n_jobs))
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n_jobs = min(n_jobs, max(1, int(cap)))
        except ValueError:
            pass
    return n_jobs


def run_replicates(
    cfg: ModelConfig,
    reps: int,
    estimate_sigma2: bool = False,
    n_jobs: int | None = 1,
) -> list[OrderEstimate]:
    """Simulate and estimate ``reps`` independent replicates, in replicate order.

    ``sigma2`` is passed through as known unless ``estimate_sigma2``. ``n_jobs``
    threads are used (``None`` for all cores), capped by ``FACTOR_ORDER_THREADS``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    tau_max = max(1, cfg.tau_max)
    cfg = replace(cfg, tau_max=tau_max)
    sigma2 = None if estimate_sigma2 else cfg.sigma2

    def one(r):
        return estimate_orders(generate_panel(cfg, r), tau_max, sigma2)

    workers = _thread_count(n_jobs)
    if workers == 1:
        return [one(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(reps)))
