"""Numeric kernels against dense-matrix and eigensolver oracles."""

import numpy as np
import pytest

from tracefluct.distributions import rademacher, uniform_sqrt3
from tracefluct.hamiltonian import (
    dense_matrix,
    derive_seed,
    eigenvalues,
    sample_potential,
    trace_f,
    trace_moments,
)
from tracefluct.series import AnalyticSeries


def dense_trace_powers(values, k_max):
    """Oracle: traces of matrix powers via dense matrix multiplication."""
    h = dense_matrix(values)
    out = [float(len(values))]
    p = np.eye(len(values))
    for _ in range(k_max):
        p = p @ h
        out.append(float(np.trace(p)))
    return np.array(out)


# ---------------------------------------------------------------- sampling


def test_sample_support():
    s = sample_potential(50, 0.7, rademacher(), seed=42)
    n = np.arange(1, 51, dtype=float)
    assert np.all(np.abs(s.values) == 1.0 / n**0.7)
    assert set(np.unique(s.xs)) == {-1.0, 1.0}


def test_sample_prefix_stability():
    for dist in (rademacher(), uniform_sqrt3()):
        small = sample_potential(100, 0.5, dist, seed=9)
        big = sample_potential(1000, 0.5, dist, seed=9)
        assert np.array_equal(small.values, big.values[:100])
        assert np.array_equal(big.prefix(100).values, small.values)


def test_sample_determinism_and_seed_derivation():
    a = sample_potential(64, 0.4, uniform_sqrt3(), seed=1234)
    b = sample_potential(64, 0.4, uniform_sqrt3(), seed=1234)
    assert np.array_equal(a.values, b.values)
    c = sample_potential(64, 0.4, uniform_sqrt3(), seed=1235)
    assert not np.array_equal(a.values, c.values)
    assert derive_seed(7, 0) == derive_seed(7, 0)
    assert derive_seed(7, 0) != derive_seed(7, 1)


def test_sample_validation():
    with pytest.raises(ValueError):
        sample_potential(0, 0.5, rademacher(), seed=1)
    with pytest.raises(ValueError):
        sample_potential(10, 0.0, rademacher(), seed=1)


# ------------------------------------------------------------ trace moments


def test_free_traces():
    v = np.zeros(10)
    t = trace_moments(v, 4)
    assert t[0] == 10
    assert t[1] == 0
    assert t[2] == 18    # 2N - 2
    assert t[3] == 0
    assert t[4] == 50    # 6N - 10


def test_single_site():
    t = trace_moments(np.array([0.37]), 5)
    assert np.allclose(t, 0.37 ** np.arange(6))


@pytest.mark.parametrize("n,k_max", [(1, 6), (2, 6), (7, 8), (20, 8)])
def test_trace_moments_vs_dense(n, k_max):
    s = sample_potential(n, 0.35, uniform_sqrt3(), seed=100 + n)
    assert np.allclose(trace_moments(s, k_max), dense_trace_powers(s.values, k_max),
                       rtol=1e-12, atol=1e-12)


def test_trace_moments_vs_eigenvalues_n500():
    s = sample_potential(500, 0.5, rademacher(), seed=77)
    t = trace_moments(s, 10)
    lam = eigenvalues(s, tol=1e-12)
    power_sums = np.array([np.sum(lam**k) for k in range(11)])
    rel = np.abs(t - power_sums) / np.maximum(1.0, np.abs(t))
    assert np.all(rel <= 1e-8)


def test_overflow_guard():
    with pytest.raises(OverflowError, match="abort"):
        trace_moments(np.full(4, 1e200), 2)


# ------------------------------------------------------------- eigenvalues


def test_free_laplacian_spectrum():
    n = 1000
    lam = eigenvalues(np.zeros(n), tol=1e-12)
    expected = np.sort(2.0 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    assert np.max(np.abs(lam - expected)) < 1e-8


def test_eigenvalues_single_site():
    assert eigenvalues(np.array([0.25])) == pytest.approx([0.25])


def test_spectrum_inclusion():
    for seed in range(5):
        s = sample_potential(200, 0.3, uniform_sqrt3(), seed=seed)
        lam = eigenvalues(s)
        edge = 2.0 + s.dist.bound
        assert np.all(lam >= -edge - 1e-9)
        assert np.all(lam <= edge + 1e-9)


# ------------------------------------------------------------------ trace_f


def test_trace_f_linear():
    s = sample_potential(37, 0.45, rademacher(), seed=5)
    res = trace_f(s, AnalyticSeries.monomial(1))
    assert res.value == pytest.approx(np.sum(s.values), rel=1e-14)
    assert res.tail_bound == 0.0


def test_trace_f_odd_free_operator():
    f = AnalyticSeries.polynomial([0, -6, 0, 1])
    res = trace_f(np.zeros(10), f)
    assert res.value == 0.0


def test_trace_f_exponential_vs_eigensolver():
    s = sample_potential(100, 0.5, rademacher(), seed=3)
    f = AnalyticSeries.exponential(1 / 8)
    res = trace_f(s, f, tail_tol=1e-9)
    lam = eigenvalues(s, tol=1e-13)
    oracle = np.sum(np.exp(lam / 8.0))
    assert res.tail_bound <= 1e-9
    assert res.value == pytest.approx(oracle, abs=1e-7)


def test_trace_f_radius_rejected():
    s = sample_potential(10, 0.5, rademacher(), seed=1)
    tight = AnalyticSeries.from_coefficients(
        lambda j: 2.5**-j, radius=2.5, case="A", label="tight"
    )
    with pytest.raises(ValueError, match="radius"):
        trace_f(s, tight)
