"""Exact mean decomposition: constants, corrections, and the oracle identity."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tracefluct.combinatorics import profile_counts
from tracefluct.distributions import rademacher, uniform_sqrt3
from tracefluct.expansion import (
    boundary_correction,
    boundary_correction_limit,
    divergent_power_cutoff,
    exact_mean_trace_f,
    exact_mean_trace_power,
    flat_free_constants,
    placement_correction,
    placement_correction_bound,
    power_expansion,
    power_partial_sum,
    power_sum_coefficient,
    series_expansion,
)
from tracefluct.hamiltonian import dense_matrix
from tracefluct.series import AnalyticSeries
from tracefluct.symbolic import exact_expectation_trace_power, trace_power_polynomial


def direct_boundary_correction(n, k, alpha, dist):
    """Oracle: the boundary-window defect from the full N-site polynomial."""
    poly = trace_power_polynomial(n, k)
    parts = []
    for beta, count in profile_counts(k).items():
        if beta.weight == 0:
            continue
        ex = float(dist.moment_product(beta))
        if ex == 0:
            continue
        for iota in list(range(1, k)) + list(range(n - k + 1, n + 1)):
            a = 0
            if 1 <= iota and iota + beta.span <= n:
                a = poly.coefficient(beta, iota)
            w = math.prod((iota + h) ** (-alpha * c) for h, c in beta.pairs)
            parts.append((a - count) * ex * w)
    return math.fsum(parts)


# ---------------------------------------------------------------- constants


def test_flat_free_constants_values():
    assert flat_free_constants(2) == (2, -2)
    assert flat_free_constants(4) == (6, -10)
    assert flat_free_constants(3) == (0, 0)
    assert flat_free_constants(0) == (1, 0)


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_flat_free_constants_vs_dense_trace(k):
    lin, off = flat_free_constants(k)
    n = 8
    h = dense_matrix(np.zeros(n))
    dense = np.trace(np.linalg.matrix_power(h, k))
    assert lin * n + off == int(round(dense))


def test_power_sum_coefficient_examples():
    assert power_sum_coefficient(4, 2, rademacher()) == 8
    assert power_sum_coefficient(2, 2, uniform_sqrt3()) == 1
    # weight 4 at k=4 is the all-flat path; fourth moment 9/5
    assert power_sum_coefficient(4, 4, uniform_sqrt3()) == Fraction(9, 5)


@pytest.mark.parametrize("k", range(1, 13))
@pytest.mark.parametrize("dist", [rademacher(), uniform_sqrt3()], ids=["rad", "uni"])
def test_first_order_coefficient_vanishes(k, dist):
    assert power_sum_coefficient(k, 1, dist) == 0


@pytest.mark.parametrize("k", range(1, 11))
def test_coefficient_parity(k):
    d = uniform_sqrt3()
    for j in range(1, k + 1):
        if (k - j) % 2 == 1:
            assert power_sum_coefficient(k, j, d) == 0


# --------------------------------------------------------------- power sums


def test_power_partial_sum_values():
    assert power_partial_sum(1, 3, 0.5) == 1.0
    h100 = sum(1.0 / i for i in range(1, 101))
    assert power_partial_sum(100, 2, 0.5) == pytest.approx(h100, rel=1e-14)


def test_power_partial_sum_log_growth():
    # at j*alpha = 1 the sum grows like log N
    s_small = power_partial_sum(10**3, 2, 0.5)
    s_big = power_partial_sum(10**6, 2, 0.5)
    assert abs((s_big - s_small) - math.log(10**3)) < 0.01


def test_power_partial_sum_bounded_when_convergent():
    alpha, j = 0.8, 2
    s = power_partial_sum(10**5, j, alpha)
    assert s <= 1.0 + 1.0 / (j * alpha - 1.0)
    assert power_partial_sum(10**4, j, alpha) <= s  # monotone


def test_divergent_power_cutoff():
    assert divergent_power_cutoff(0.26) == 3
    assert divergent_power_cutoff(0.3) == 3
    assert divergent_power_cutoff(0.25) == 4   # boundary j*alpha == 1 included
    assert divergent_power_cutoff(0.5) == 2
    assert divergent_power_cutoff(0.8) == 1
    assert divergent_power_cutoff(2.0) == 0


# ---------------------------------------------------------------- boundary


def test_boundary_trivial_cases():
    assert boundary_correction(30, 1, 0.5, rademacher()) == 0.0
    assert boundary_correction(10, 2, 0.5, rademacher()) == 0.0
    with pytest.raises(ValueError, match="N > 2k"):
        boundary_correction(8, 4, 0.5, rademacher())


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("dist", [rademacher(), uniform_sqrt3()], ids=["rad", "uni"])
def test_boundary_matches_direct_window_sum(k, dist):
    for n in (2 * k + 2, 25, 40):
        got = boundary_correction(n, k, 0.45, dist)
        want = direct_boundary_correction(n, k, 0.45, dist)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-14)


def test_boundary_left_window_stable_right_window_decays():
    k, alpha, dist = 4, 0.5, rademacher()
    limit = boundary_correction_limit(k, alpha, dist)
    b20 = boundary_correction(20, k, alpha, dist)
    b40 = boundary_correction(40, k, alpha, dist)
    b800 = boundary_correction(800, k, alpha, dist)
    # the left-window part is N-independent; the rest shrinks toward 0
    assert abs(b800 - limit) < abs(b40 - limit) < abs(b20 - limit)
    assert abs(b800 - limit) < 5e-3


# --------------------------------------------------------------- placement


def test_placement_trivial_cases():
    # single-level profiles carry no collapse error
    assert placement_correction(50, 2, 0.5, uniform_sqrt3()) == 0.0
    # all surviving profiles at k=4 under a symmetric law are single-level
    for n in (10, 100, 1000):
        assert placement_correction(n, 4, 0.5, rademacher()) == 0.0


def test_placement_bound_and_monotonicity():
    k, alpha, d = 6, 0.5, uniform_sqrt3()
    bound = placement_correction_bound(k, alpha, d)
    prev = None
    for n in (10**2, 10**3, 10**4):
        val = placement_correction(n, k, alpha, d)
        assert abs(val) <= bound
        if prev is not None:
            assert val <= prev + 1e-15  # decreasing: the collapse defect accumulates
        prev = val
    # successive values differ by less than the remaining tail allows
    assert abs(placement_correction(10**4, k, alpha, d)
               - placement_correction(10**3, k, alpha, d)) < 1e-3


# ------------------------------------------------------------- exact means


def test_exact_mean_k1_and_k2():
    assert exact_mean_trace_power(100, 1, 0.5, rademacher()) == 0.0
    h100 = sum(1.0 / i for i in range(1, 101))
    got = exact_mean_trace_power(100, 2, 0.5, rademacher())
    assert got == pytest.approx(198 + h100, rel=1e-13)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("dist", [rademacher(), uniform_sqrt3()], ids=["rad", "uni"])
def test_exact_mean_matches_symbolic(k, alpha, dist):
    for n in (2 * k + 2, 30):
        fast = exact_mean_trace_power(n, k, alpha, dist)
        oracle = exact_expectation_trace_power(n, k, alpha, dist)
        assert fast == pytest.approx(oracle, rel=1e-11, abs=1e-11)


def test_exact_mean_k4_alpha03():
    n = 30
    fast = exact_mean_trace_power(n, 4, 0.3, rademacher())
    oracle = exact_expectation_trace_power(n, 4, 0.3, rademacher())
    assert abs(fast - oracle) <= 1e-10 * max(1.0, abs(oracle))


def test_exact_mean_large_n_runs_fast():
    val = exact_mean_trace_power(10**5, 4, 0.3, rademacher())
    assert np.isfinite(val)


# ----------------------------------------------------------------- reports


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_power_report_identity(k):
    n, alpha, d = 30, 0.35, uniform_sqrt3()
    rep = power_expansion(k, n, alpha, d)
    oracle = exact_expectation_trace_power(n, k, alpha, d)
    assert rep.reconstructed_mean == pytest.approx(oracle, rel=1e-11)
    assert rep.reconstructed_mean == pytest.approx(
        exact_mean_trace_power(n, k, alpha, d), rel=1e-13)
    assert rep.powersum_coeffs.get(1, 0.0) == 0.0


def test_series_report_x2():
    # quadratic: growing part is 2N - 2 + eta^2 * S_2(N)
    f = AnalyticSeries.polynomial([0, 0, 1])
    rep = series_expansion(f, 10**4, 0.3, rademacher())
    assert rep.linear_coeff == 2.0
    assert rep.constant_coeff == -2.0
    assert rep.powersum_coeffs[2] == 1.0
    assert rep.m_cutoff == 3
    # degree <= cutoff: the remainder is purely constant + boundary + placement
    assert rep.remainder == pytest.approx(rep.constant_coeff + rep.boundary + rep.placement)
    assert rep.boundary == 0.0 and rep.placement == 0.0
    assert rep.leading_coefficients() == {0: 2.0, 1: 0.0, 2: 1.0, 3: 0.0}


def test_series_report_identity_vs_power_sums():
    f = AnalyticSeries.polynomial([0.5, 0, 1, 0, 2])
    n, alpha, d = 40, 0.26, uniform_sqrt3()
    rep = series_expansion(f, n, alpha, d)
    direct = math.fsum(
        c * exact_mean_trace_power(n, l, alpha, d)
        for l, c in enumerate(f.coeffs) if c
    )
    assert rep.reconstructed_mean == pytest.approx(direct, rel=1e-12)
    assert rep.reconstructed_mean == pytest.approx(
        exact_mean_trace_f(f, n, alpha, d), rel=1e-12)


def test_series_report_exponential_truncation():
    f = AnalyticSeries.exponential(1 / 8)
    n, alpha, d = 30, 0.5, rademacher()
    rep = series_expansion(f, n, alpha, d, tail_tol=1e-9)
    assert rep.tail_bound <= 1e-9
    direct = math.fsum(
        f.coefficient(l) * exact_expectation_trace_power(n, l, alpha, d)
        for l in range(rep.truncation_degree + 1)
    )
    assert rep.reconstructed_mean == pytest.approx(direct, rel=1e-10)


def test_series_report_remainder_trend():
    # the bounded part settles as N grows
    f = AnalyticSeries.polynomial([0, 0, 1, 0, 1])
    d = rademacher()
    rems = [series_expansion(f, n, 0.26, d).remainder for n in (10**3, 10**4, 10**5)]
    gaps = [abs(rems[1] - rems[0]), abs(rems[2] - rems[1])]
    assert gaps[1] < gaps[0]  # Cauchy trend


def test_report_to_dict_roundtrip():
    rep = power_expansion(4, 30, 0.5, rademacher())
    d = rep.to_dict()
    assert d["kind"] == "power"
    assert d["reconstructed_mean"] == rep.reconstructed_mean
    assert set(d["powersum_coeffs"]) == {"1", "2", "3", "4"}
