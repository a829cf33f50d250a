import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dfmorder import (
    EmptyInput,
    InsufficientColumns,
    NonFinite,
    Panel,
    RaggedRows,
    Spectrum,
    build_sym_lag_cov,
    eigenvalues_sym,
    lag_spectra,
    validate_panel,
)


def loop_lag_cov(x, tau, t_used):
    # entry-by-entry definition, no matrix products
    n = x.shape[0]
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            s = 0.0
            for j in range(t_used):
                s += x[a, j] * x[b, j + tau] + x[a, j + tau] * x[b, j]
            out[a, b] = s / (2 * t_used)
    return out


@pytest.mark.parametrize("tau", [0, 1, 3])
def test_lag_cov_matches_loop_oracle(tau):
    rng = np.random.default_rng(11)
    x = rng.standard_normal((4, 12))
    t_used = 12 - 3
    cov = build_sym_lag_cov(validate_panel(x), tau, t_used)
    np.testing.assert_allclose(cov.matrix, loop_lag_cov(x, tau, t_used), rtol=1e-13, atol=1e-14)
    assert cov.tau == tau and cov.t_used == t_used


def test_lag_cov_exactly_symmetric():
    rng = np.random.default_rng(2)
    cov = build_sym_lag_cov(validate_panel(rng.standard_normal((30, 70))), 2, 60)
    assert np.array_equal(cov.matrix, cov.matrix.T)


def test_lag0_is_psd_and_lag_tau_indefinite():
    rng = np.random.default_rng(3)
    spectra = lag_spectra(validate_panel(rng.standard_normal((40, 80))), 2)
    assert spectra[0].eigenvalues.min() > -1e-12
    assert spectra[1].eigenvalues.min() < 0 < spectra[1].eigenvalues.max()


def test_lag_spectra_share_t():
    rng = np.random.default_rng(4)
    spectra = lag_spectra(validate_panel(rng.standard_normal((5, 20))), 4)
    assert [s.tau for s in spectra] == [0, 1, 2, 3, 4]
    assert {s.t_used for s in spectra} == {16}
    assert spectra[0].c == pytest.approx(5 / 16)


def test_insufficient_columns():
    p = validate_panel(np.ones((3, 5)))
    with pytest.raises(InsufficientColumns):
        build_sym_lag_cov(p, 2, 4)
    with pytest.raises(InsufficientColumns):
        lag_spectra(p, 5)


def test_validate_errors():
    with pytest.raises(EmptyInput):
        validate_panel([])
    with pytest.raises(EmptyInput):
        validate_panel(np.empty((0, 3)))
    with pytest.raises(RaggedRows) as err:
        validate_panel([[1.0, 2.0], [3.0]])
    assert err.value.row == 1 and err.value.expected == 2 and err.value.got == 1
    bad = np.ones((3, 4))
    bad[0, 2] = np.nan
    bad[2, 1] = np.inf
    with pytest.raises(NonFinite) as err:
        validate_panel(bad)
    assert err.value.cells == [(0, 2), (2, 1)]
    assert (err.value.row, err.value.col) == (0, 2)


def test_validate_copies_and_freezes():
    raw = np.arange(6.0).reshape(2, 3)
    p = validate_panel(raw)
    raw[0, 0] = 99.0
    assert p.data[0, 0] == 0.0
    assert not p.data.flags.writeable
    assert validate_panel([1.0, 2.0, 3.0]).data.shape == (1, 3)


def test_spectrum_orderings():
    s = Spectrum(np.array([0.5, -3.0, 2.0, -0.1]), tau=1, n=4, t_used=8)
    assert s.eigenvalues.tolist() == [2.0, 0.5, -0.1, -3.0]
    assert s.abs_sorted.tolist() == [3.0, 2.0, 0.5, 0.1]
    assert s.scaled(2.0).eigenvalues.tolist() == [4.0, 1.0, -0.2, -6.0]
    with pytest.raises(ValueError):
        Spectrum(np.zeros(3), tau=0, n=4, t_used=8)


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, (6, 15), elements=st.floats(-1e3, 1e3, allow_nan=False)),
    st.integers(0, 4),
    st.sampled_from([0.25, 0.5, 2.0, 8.0]),
)
def test_scaling_property(x, tau, s):
    # powers of two scale every float operation exactly
    p = validate_panel(x)
    base = build_sym_lag_cov(p, tau, 10).matrix
    scaled = build_sym_lag_cov(p.scaled(s), tau, 10).matrix
    assert np.array_equal(scaled, base * s * s)
    assert np.array_equal(base, base.T)


def test_eigenvalues_sym_trace():
    rng = np.random.default_rng(5)
    cov = build_sym_lag_cov(validate_panel(rng.standard_normal((20, 50))), 1, 45)
    spec = eigenvalues_sym(cov)
    assert spec.eigenvalues.sum() == pytest.approx(np.trace(cov.matrix), abs=1e-12)
    assert isinstance(Panel(np.ones((1, 1))).n, int)
