"""The acceptance suite: every shipped claim, runnable as one batch.

Each criterion is a deterministic check (fixed seeds for the ensemble
experiments) returning a :class:`CriterionResult`; the pytest suite and
the command line both drive :func:`run_criteria` and report one line per
criterion.  Statistical tolerances are part of the criterion definitions
below, not tunable knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .combinatorics import (
    MultiIndex,
    flat_weight_count,
    profile_count,
    same_level_pair_count,
    single_flat_count,
)
from .distributions import rademacher, uniform_sqrt3
from .expansion import power_expansion, series_expansion
from .hamiltonian import eigenvalues, sample_potential, trace_moments
from .montecarlo import (
    EnsembleConfig,
    case_a_sigma_sq,
    case_b_sigma_sq,
    clt_check,
    convergence_check,
    joint_correlation,
    run_ensemble,
)
from .series import AnalyticSeries
from .symbolic import exact_expectation_trace_power, verify_interior_identity


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str
    measured: dict = field(default_factory=dict)

    def format_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid:2d}: {self.name} -- {self.detail}"


def _sqrt3_weighted_leq(lhs: tuple[int, int], rhs: tuple[int, int]) -> bool:
    """Exact comparison a1 + b1*sqrt(3) <= a2 + b2*sqrt(3) over integers."""
    x = rhs[0] - lhs[0]
    y = rhs[1] - lhs[1]
    if x >= 0 and y >= 0:
        return True
    if x < 0 and y < 0:
        return False
    if x >= 0:  # y < 0: need x >= |y|*sqrt(3)
        return x * x >= 3 * y * y
    return 3 * y * y >= x * x  # x < 0 <= y: need |x| <= y*sqrt(3)


# ----------------------------------------------------------------- criteria


def _criterion_1() -> CriterionResult:
    bad = []
    for k in range(1, 14, 2):
        if profile_count(k, MultiIndex.delta()) != single_flat_count(k):
            bad.append(("delta", k))
    for j in range(2, 13, 2):
        if profile_count(j, MultiIndex.two_delta()) != same_level_pair_count(j):
            bad.append(("two_delta", j))
    return CriterionResult(
        1, "closed forms vs enumeration",
        not bad,
        "all single-flat (odd k<=13) and shared-pair (even j<=12) counts agree"
        if not bad else f"mismatches at {bad}",
    )


def _criterion_2() -> CriterionResult:
    bad = []
    for l in range(1, 13):
        counts = [flat_weight_count(l, j) for j in range(l + 1)]
        # per-weight bound, exact integers
        for j, c in enumerate(counts):
            cap = math.comb(l, j) * (math.comb(l - j, (l - j) // 2) if (l - j) % 2 == 0 else 0)
            if (l - j) % 2 == 0 and c > cap:
                bad.append(("weight", l, j))
        # geometric bound at C_X = 1, exact integers
        if sum(c * 1**j for j, c in enumerate(counts)) > 3**l:
            bad.append(("cx1", l))
        # geometric bound at C_X = sqrt(3): a + b*sqrt(3) arithmetic
        lhs = [0, 0]
        for j, c in enumerate(counts):
            if j % 2 == 0:
                lhs[0] += c * 3 ** (j // 2)
            else:
                lhs[1] += c * 3 ** ((j - 1) // 2)
        rhs = [0, 0]
        for i in range(l + 1):  # (2 + sqrt(3))^l by binomial expansion
            term = math.comb(l, i) * 2 ** (l - i)
            if i % 2 == 0:
                rhs[0] += term * 3 ** (i // 2)
            else:
                rhs[1] += term * 3 ** ((i - 1) // 2)
        if not _sqrt3_weighted_leq(tuple(lhs), tuple(rhs)):
            bad.append(("cx_sqrt3", l))
    return CriterionResult(
        2, "flat-count bounds, exact arithmetic",
        not bad,
        "weight and geometric bounds hold for all l <= 12, C_X in {1, sqrt(3)}"
        if not bad else f"violations: {bad}",
    )


def _criterion_3() -> CriterionResult:
    bad = []
    checked = 0
    for k in range(1, 9):
        rep = verify_interior_identity(20, k)
        checked += rep.checked_interior + rep.checked_boundary
        if not rep.ok:
            bad.append((k, rep.interior_violations[:3], rep.boundary_violations[:3]))
    return CriterionResult(
        3, "coefficient identity at N=20, k<=8",
        not bad,
        f"{checked} placements checked; interior coefficients equal path counts, "
        "boundary ones never exceed them" if not bad else f"violations: {bad}",
    )


def _criterion_4() -> CriterionResult:
    worst = 0.0
    worst_at = None
    for k in range(1, 9):
        for n in sorted({2 * k + 2, 30, 40}):
            for dist in (rademacher(), uniform_sqrt3()):
                for alpha in (0.2, 0.35, 0.5, 0.8):
                    oracle = exact_expectation_trace_power(n, k, alpha, dist)
                    mean = power_expansion(k, n, alpha, dist).reconstructed_mean
                    rel = abs(mean - oracle) / max(1.0, abs(oracle))
                    if rel > worst:
                        worst, worst_at = rel, (k, n, alpha, dist.name)
    return CriterionResult(
        4, "mean decomposition identity",
        worst <= 1e-9,
        f"max relative deviation {worst:.2e} at {worst_at} (tolerance 1e-9)",
        {"worst": worst},
    )


def _criterion_5() -> CriterionResult:
    issues = []
    lam = eigenvalues(np.zeros(1000), tol=1e-12)
    expect = np.sort(2.0 * np.cos(np.arange(1, 1001) * np.pi / 1001))
    dev = float(np.max(np.abs(lam - expect)))
    if dev > 1e-8:
        issues.append(f"free spectrum deviation {dev:.2e}")
    for n in (10, 500):
        t = trace_moments(np.zeros(n), 4)
        if t[2] != 2 * n - 2 or t[4] != 6 * n - 10:
            issues.append(f"free traces wrong at N={n}")
    s = sample_potential(500, 0.5, rademacher(), seed=505)
    t = trace_moments(s, 10)
    lam = eigenvalues(s, tol=1e-12)
    ps = np.array([np.sum(lam**k) for k in range(11)])
    rel = float(np.max(np.abs(t - ps) / np.maximum(1.0, np.abs(t))))
    if rel > 1e-8:
        issues.append(f"moment/eigenvalue mismatch {rel:.2e}")
    return CriterionResult(
        5, "numeric kernels",
        not issues,
        f"spectrum dev {dev:.1e}, moment/power-sum rel dev {rel:.1e}"
        if not issues else "; ".join(issues),
    )


def _criterion_6() -> CriterionResult:
    from .combinatorics import enumerate_closed_paths

    def brute_a(coeffs, dist):
        kern = sum(
            coeffs[j] * sum(1 for p in enumerate_closed_paths(j)
                            if p.flat_profile() == MultiIndex.delta())
            for j in range(1, len(coeffs))
        )
        return kern**2 * float(dist.variance)

    def brute_b(coeffs, dist):
        degree = len(coeffs) - 1
        shared = 0.0
        split = {}
        for j in range(2, degree + 1):
            for p in enumerate_closed_paths(j):
                prof = p.flat_profile()
                if prof == MultiIndex.two_delta():
                    shared += coeffs[j]
                elif prof.weight == 2 and len(prof.pairs) == 2:
                    split[prof.pairs[1][0]] = split.get(prof.pairs[1][0], 0.0) + coeffs[j]
        eta2 = float(dist.variance)
        return (shared**2 * (float(dist.moment(4)) - eta2**2)
                + sum(v**2 for v in split.values()) * eta2**2)

    issues = []
    x3 = AnalyticSeries.monomial(3)
    for dist in (rademacher(), uniform_sqrt3()):
        got = case_a_sigma_sq(x3, dist)
        want = 36.0 * float(dist.variance)
        if got != want or abs(got - brute_a(x3.coefficients_upto(3), dist)) > 1e-12:
            issues.append(f"case A x^3 under {dist.name}: {got}")
    u = uniform_sqrt3()
    b2 = case_b_sigma_sq(AnalyticSeries.monomial(2), u)
    if abs(b2 - 0.8) > 1e-12 or abs(b2 - brute_b([0, 0, 1], u)) > 1e-12:
        issues.append(f"case B x^2: {b2}")
    b4 = case_b_sigma_sq(AnalyticSeries.monomial(4), u)
    if abs(b4 - 67.2) > 1e-12 or abs(b4 - brute_b([0, 0, 0, 0, 1], u)) > 1e-12:
        issues.append(f"case B x^4: {b4}")
    return CriterionResult(
        6, "limiting variance evaluators",
        not issues,
        "sigma^2 values 36*eta^2, 4/5 and 67.2 match brute-force path sums to 1e-12"
        if not issues else "; ".join(issues),
    )


def _normality_ok(entry, sigma_sq: float) -> tuple[bool, str]:
    ratio = entry.variance / sigma_sq
    ok = (0.85 <= ratio <= 1.15 and abs(entry.skewness) <= 0.15
          and abs(entry.excess_kurtosis) <= 0.30)
    msg = (f"var ratio {ratio:.3f}, skew {entry.skewness:+.3f}, "
           f"ex.kurt {entry.excess_kurtosis:+.3f}")
    return ok, msg


def _criterion_7() -> CriterionResult:
    cfg_a = EnsembleConfig(alpha=0.3, dist=rademacher(),
                           functions=(AnalyticSeries.monomial(1),),
                           n_grid=(100_000,), replicas=1000, base_seed=710)
    rep_a = clt_check(run_ensemble(cfg_a), sigma_theory={"x^1": 1.0})
    ok_a, msg_a = _normality_ok(rep_a.entry("x^1", 100_000), 1.0)

    cfg_b = EnsembleConfig(alpha=0.3, dist=rademacher(),
                           functions=(AnalyticSeries.monomial(3),),
                           n_grid=(50_000,), replicas=1000, base_seed=730)
    rep_b = clt_check(run_ensemble(cfg_b), sigma_theory={"x^3": 36.0})
    ok_b, msg_b = _normality_ok(rep_b.entry("x^3", 50_000), 36.0)
    return CriterionResult(
        7, "case A normal limit",
        ok_a and ok_b,
        f"x at N=1e5: {msg_a}; x^3 at N=5e4: {msg_b} "
        "(variance within 15%, |skew|<=0.15, |ex.kurt|<=0.30)",
    )


def _criterion_8() -> CriterionResult:
    f2 = AnalyticSeries.monomial(2)
    cfg = EnsembleConfig(alpha=0.2, dist=uniform_sqrt3(), functions=(f2,),
                         n_grid=(100_000,), replicas=1000, base_seed=800)
    rep = clt_check(run_ensemble(cfg), sigma_theory={"x^2": 0.8})
    ok, msg = _normality_ok(rep.entry("x^2", 100_000), 0.8)

    cfg_deg = EnsembleConfig(alpha=0.2, dist=rademacher(), functions=(f2,),
                             n_grid=(100_000,), replicas=1000, base_seed=801)
    rep_deg = clt_check(run_ensemble(cfg_deg), sigma_theory={"x^2": 0.0})
    deg = rep_deg.entry("x^2", 100_000)
    ok_deg = deg.variance <= 0.05 and deg.degenerate
    return CriterionResult(
        8, "case B normal limit and degeneracy",
        ok and ok_deg,
        f"uniform law: {msg}; sign law scaled variance {deg.variance:.2e} <= 0.05",
    )


def _criterion_9() -> CriterionResult:
    cfg = EnsembleConfig(alpha=0.3, dist=rademacher(),
                         functions=(AnalyticSeries.monomial(1), AnalyticSeries.monomial(3)),
                         n_grid=(50_000,), replicas=1000, base_seed=900)
    rep = joint_correlation(run_ensemble(cfg))
    corr = float(rep.matrix(50_000)[0, 1])
    return CriterionResult(
        9, "joint fluctuations are rank one",
        corr >= 0.95,
        f"correlation of x and x^3 fluctuations {corr:.4f} (>= 0.95)",
        {"correlation": corr},
    )


def _criterion_10() -> CriterionResult:
    f = AnalyticSeries.polynomial([0, -6, 0, 1])
    grid = (10_000, 30_000, 100_000)
    cfg = EnsembleConfig(alpha=0.1, dist=uniform_sqrt3(), functions=(f,),
                         n_grid=grid, replicas=500, base_seed=1000)
    res = run_ensemble(cfg)
    label = f.label
    vars_c = [float(np.var(res.scaled(label, n), ddof=1)) for n in grid]  # t = 0.6
    spread = max(vars_c) / min(vars_c)
    vars_a = [float(np.var(res.scaled(label, n, t=0.2), ddof=1)) for n in grid]
    shrinking = all(b < a for a, b in zip(vars_a[:-1], vars_a[1:]))
    vanish = vars_a[-1] <= 0.5 * vars_a[0]
    ok = spread <= 1.25 and shrinking and vanish
    return CriterionResult(
        10, "odd-normal-form scaling",
        ok,
        f"stabilised variances {[f'{v:.3f}' for v in vars_c]} (spread {spread:.3f} <= 1.25); "
        f"leading-scale variances {[f'{v:.4f}' for v in vars_a]} decay to "
        f"{vars_a[-1] / vars_a[0]:.2f} of the first",
        {"vars_stabilised": vars_c, "vars_leading": vars_a},
    )


def _criterion_11() -> CriterionResult:
    cfg = EnsembleConfig(alpha=0.8, dist=rademacher(),
                         functions=(AnalyticSeries.monomial(1),),
                         n_grid=(20_000, 100_000), replicas=200, base_seed=1100)
    rep = convergence_check(run_ensemble(cfg))
    pair = rep.pairs[0]
    ok = pair.diff_variance <= 1.5 * pair.variance_bound
    return CriterionResult(
        11, "supercritical fluctuation convergence",
        ok,
        f"Var(T_100000 - T_20000) = {pair.diff_variance:.3e} vs 1.5 x tail bound "
        f"{1.5 * pair.variance_bound:.3e}",
        {"variance": pair.diff_variance, "bound": pair.variance_bound},
    )


def _criterion_12() -> CriterionResult:
    f = AnalyticSeries.polynomial([0, 0, 1, 0, 1])
    dist = rademacher()
    rems = [series_expansion(f, n, 0.26, dist).remainder for n in (10**3, 10**4, 10**5)]
    gap1 = abs(rems[1] - rems[0])
    gap2 = abs(rems[2] - rems[1])
    cauchy = gap2 < gap1
    shrink = gap1 / gap2 if gap2 > 0 else math.inf
    ok = cauchy and shrink >= 2.0
    return CriterionResult(
        12, "series remainder convergence rate",
        ok,
        f"remainders {[f'{r:.4f}' for r in rems]}; gaps {gap1:.4f} -> {gap2:.4f} "
        f"(shrink factor {shrink:.2f}, required >= 2)",
        {"remainders": rems, "shrink": shrink},
    )


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: _criterion_1, 2: _criterion_2, 3: _criterion_3, 4: _criterion_4,
    5: _criterion_5, 6: _criterion_6, 7: _criterion_7, 8: _criterion_8,
    9: _criterion_9, 10: _criterion_10, 11: _criterion_11, 12: _criterion_12,
}


def run_criteria(only: list[int] | None = None) -> list[CriterionResult]:
    ids = sorted(CRITERIA) if only is None else sorted(only)
    return [CRITERIA[cid]() for cid in ids]
