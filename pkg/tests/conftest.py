import functools

import pytest

from dfmorder import ModelConfig, run_replicates

REFERENCE_DESIGN = ModelConfig(n=450, T=500, k=2, q=2, beta=1.0, sigma_f2=4.0, sigma2=1.0, sigma_eps2=0.25, seed=0, tau_max=5)
REFERENCE_COUNTS = [6, 8, 8, 12, 12, 12]

ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def reference_runs(estimate_sigma2: bool):
    """Ten seeded replicates of the reference design, shared across test modules."""
    return tuple(run_replicates(REFERENCE_DESIGN, 10, estimate_sigma2=estimate_sigma2, n_jobs=None))


@pytest.fixture(scope="session")
def known_runs():
    return reference_runs(False)


@pytest.fixture(scope="session")
def unknown_runs():
    return reference_runs(True)


def record_acceptance(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
