"""Exact decomposition of E[Tr H^k] and its aggregation over a series.

For the N-site operator with potential V(n) = X_n / n^alpha the mean
trace of a power splits, exactly and for every finite N, into

    linear * N + constant                (flat-step-free paths)
  + boundary correction                 (edge-clipped coefficients)
  + sum_j  coeff_j * sum_{i<=N} i^(-j*alpha)   (interior placements)
  + placement correction                (multi-site weight collapse)

where ``coeff_j`` sums path counts against moments over the canonical
weight-j profiles.  Everything here is evaluated without asymptotic
approximation; the decomposition reproduces the symbolic oracle to
rounding error and gives an O(N) centering constant for large ensembles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import MultiIndex, no_flat_closed_stats, profile_counts
from .distributions import DistributionSpec
from .series import AnalyticSeries, require_radius
from .symbolic import DEFAULT_POWER_CAP, TracePolynomial, trace_power_polynomial

_EPS_CUTOFF = 1e-12


def divergent_power_cutoff(alpha: float) -> int:
    """Largest j with j*alpha <= 1: the orders whose partial power sums diverge.

    The boundary case j*alpha == 1 (logarithmic growth) is included.
    """
    if alpha <= 0:
        raise ValueError("the decay exponent must be positive")
    return max(0, math.floor((1.0 + _EPS_CUTOFF) / alpha))


@lru_cache(maxsize=None)
def flat_free_constants(k: int) -> tuple[int, int]:
    """(per-site, offset) of the flat-free trace: Tr of the hopping-only power.

    The flat-free closed paths contribute ``per_site * N + offset`` to
    Tr H^k for every N large enough that no walk can span both edges;
    ``per_site`` is C(k, k/2) for even k, and ``offset`` is minus the
    summed level range over those paths.
    """
    count, total_range = no_flat_closed_stats(k)
    return count, -total_range


def power_sum_coefficient(k: int, j: int, dist: DistributionSpec):
    """Moment-weighted count of weight-j profiles among closed k-paths.

    Exact (a Fraction when the law's moments are rational).  Vanishes for
    j = 1 under any centered law and whenever j, k have opposite parity.
    """
    if j < 0 or j > k:
        return Fraction(0)
    total = Fraction(0)
    for beta, count in profile_counts(k).items():
        if beta.weight != j or j == 0:
            continue
        ex = dist.moment_product(beta)
        if ex != 0:
            total = total + count * ex
    return total


def power_partial_sum(n: int, j: int, alpha: float) -> float:
    """sum_{i=1..n} i^(-j*alpha), by direct compensated summation."""
    if n < 1:
        raise ValueError("need n >= 1")
    i = np.arange(1, n + 1, dtype=float)
    return math.fsum(i ** (-j * alpha))


@lru_cache(maxsize=None)
def _reference_polynomial(n_ref: int, k: int) -> TracePolynomial:
    return trace_power_polynomial(n_ref, k, power_cap=max(DEFAULT_POWER_CAP, k),
                                  site_cap=max(64, n_ref))


def _coefficient_or_zero(poly: TracePolynomial, beta: MultiIndex, iota: int) -> int:
    if iota < 1 or iota + beta.span > poly.n_sites:
        return 0
    return poly.coefficient(beta, iota)


def boundary_correction(n: int, k: int, alpha: float, dist: DistributionSpec) -> float:
    """Defect of the edge-window coefficients against pure path counts.

    Sums (coefficient - path count) * E[V^beta] over placements whose
    lowest site falls outside [k, N-k].  Coefficients near either edge
    depend only on the distance to that edge once N > 2k, so they are
    read off a fixed small reference operator; the cost is independent
    of N.
    """
    if k == 0:
        return 0.0
    if n <= 2 * k:
        raise ValueError("boundary windows require N > 2k")
    n_ref = min(n, 2 * k + 2)
    poly = _reference_polynomial(n_ref, k)
    shift = n - n_ref
    parts = []
    for beta, count in profile_counts(k).items():
        if beta.weight == 0:
            continue
        ex = dist.moment_product(beta)
        if ex == 0:
            continue
        exf = float(ex)
        for iota in range(1, k):
            a = _coefficient_or_zero(poly, beta, iota)
            if a == count:
                continue
            weight = math.prod((iota + h) ** (-alpha * c) for h, c in beta.pairs)
            parts.append((a - count) * exf * weight)
        for iota in range(n - k + 1, n + 1):
            a = _coefficient_or_zero(poly, beta, iota - shift)
            if a == count:
                continue
            weight = math.prod((iota + h) ** (-alpha * c) for h, c in beta.pairs)
            parts.append((a - count) * exf * weight)
    return math.fsum(parts)


def boundary_correction_limit(k: int, alpha: float, dist: DistributionSpec) -> float:
    """Large-N limit of the boundary correction: the left window alone."""
    if k == 0:
        return 0.0
    poly = _reference_polynomial(2 * k + 2, k)
    parts = []
    for beta, count in profile_counts(k).items():
        if beta.weight == 0:
            continue
        ex = dist.moment_product(beta)
        if ex == 0:
            continue
        for iota in range(1, k):
            a = _coefficient_or_zero(poly, beta, iota)
            if a != count:
                weight = math.prod((iota + h) ** (-alpha * c) for h, c in beta.pairs)
                parts.append((a - count) * float(ex) * weight)
    return math.fsum(parts)


def placement_correction(n: int, k: int, alpha: float, dist: DistributionSpec) -> float:
    """Error from collapsing each placed profile's site weights to its lowest site.

    Profiles occupying a single level contribute nothing; for the rest the
    per-placement defect prod_h (i+h)^(-alpha*count) - i^(-alpha*weight)
    is summed exactly over i = 1..N.
    """
    if k == 0:
        return 0.0
    i = np.arange(1, n + 1, dtype=float)
    parts = []
    for beta, count in profile_counts(k).items():
        if beta.weight == 0 or beta.is_single_level():
            continue
        ex = dist.moment_product(beta)
        if ex == 0:
            continue
        prod = np.ones(n)
        for h, c in beta.pairs:
            prod = prod * (i + h) ** (-alpha * c)
        diff = prod - i ** (-alpha * beta.weight)
        parts.append(count * float(ex) * math.fsum(diff))
    return math.fsum(parts)


def placement_correction_bound(k: int, alpha: float, dist: DistributionSpec) -> float:
    """Upper bound on |placement correction|, uniform in N.

    Sums path count * E[|X|^beta] * sum_{i=1..k} i^(-alpha*weight) over
    all canonical profiles.
    """
    parts = []
    for beta, count in profile_counts(k).items():
        if beta.weight == 0:
            continue
        tail = sum(i ** (-alpha * beta.weight) for i in range(1, k + 1))
        parts.append(count * float(dist.abs_moment_product(beta)) * tail)
    return math.fsum(parts)


def exact_mean_trace_power(n: int, k: int, alpha: float, dist: DistributionSpec) -> float:
    """E[Tr H^k], exactly, in O(N * #profiles) time.

    Matches the symbolic oracle wherever both are computable and serves
    as the centering constant for large-N ensembles.
    """
    if k == 0:
        return float(n)
    if n <= 2 * k:
        raise ValueError("the fast mean requires N > 2k; use the symbolic oracle below that")
    lin, off = flat_free_constants(k)
    parts = [float(lin) * n + off, boundary_correction(n, k, alpha, dist)]
    i = np.arange(1, n + 1, dtype=float)
    for beta, count in profile_counts(k).items():
        if beta.weight == 0:
            continue
        ex = dist.moment_product(beta)
        if ex == 0:
            continue
        prod = np.ones(n)
        for h, c in beta.pairs:
            prod = prod * (i + h) ** (-alpha * c)
        parts.append(count * float(ex) * math.fsum(prod))
    return math.fsum(parts)


@dataclass
class ExpansionReport:
    """All constants of the exact mean decomposition for one power or series.

    ``reconstructed_mean`` assembles the pieces and must reproduce the
    oracle mean identically:

        linear_coeff * N + constant_coeff + boundary + placement
            + sum_j powersum_coeffs[j] * powersums[j].

    ``remainder`` collects the parts that stay bounded as N grows:
    constant + boundary + placement + the power-sum terms of order
    beyond ``m_cutoff``.
    """

    kind: str
    label: str
    n_sites: int
    alpha: float
    dist_name: str
    linear_coeff: float
    constant_coeff: float
    boundary: float
    placement: float
    powersum_coeffs: dict[int, float]
    powersums: dict[int, float]
    m_cutoff: int
    truncation_degree: int
    tail_bound: float

    @property
    def reconstructed_mean(self) -> float:
        tail = math.fsum(
            self.powersum_coeffs[j] * self.powersums[j] for j in self.powersum_coeffs
        )
        return (self.linear_coeff * self.n_sites + self.constant_coeff
                + self.boundary + self.placement + tail)

    @property
    def remainder(self) -> float:
        beyond = math.fsum(
            c * self.powersums[j] for j, c in self.powersum_coeffs.items()
            if j > self.m_cutoff
        )
        return self.constant_coeff + self.boundary + self.placement + beyond

    def leading_coefficients(self) -> dict[int, float]:
        """Coefficients of the growing terms: order 0 (the N term) up to the cutoff."""
        out = {0: self.linear_coeff}
        for j in range(1, self.m_cutoff + 1):
            out[j] = self.powersum_coeffs.get(j, 0.0)
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "n_sites": self.n_sites,
            "alpha": self.alpha,
            "dist": self.dist_name,
            "linear_coeff": self.linear_coeff,
            "constant_coeff": self.constant_coeff,
            "boundary": self.boundary,
            "placement": self.placement,
            "powersum_coeffs": {str(j): c for j, c in self.powersum_coeffs.items()},
            "powersums": {str(j): s for j, s in self.powersums.items()},
            "m_cutoff": self.m_cutoff,
            "truncation_degree": self.truncation_degree,
            "tail_bound": self.tail_bound,
            "remainder": self.remainder,
            "reconstructed_mean": self.reconstructed_mean,
        }


def power_expansion(k: int, n: int, alpha: float, dist: DistributionSpec) -> ExpansionReport:
    """Full decomposition report for a single power Tr H^k."""
    if k == 0:
        lin, off = 1, 0
        coeffs: dict[int, float] = {}
    else:
        lin, off = flat_free_constants(k)
        coeffs = {j: float(power_sum_coefficient(k, j, dist)) for j in range(1, k + 1)}
    return ExpansionReport(
        kind="power",
        label=f"x^{k}",
        n_sites=n,
        alpha=alpha,
        dist_name=dist.name,
        linear_coeff=float(lin),
        constant_coeff=float(off),
        boundary=boundary_correction(n, k, alpha, dist) if k else 0.0,
        placement=placement_correction(n, k, alpha, dist) if k else 0.0,
        powersum_coeffs=coeffs,
        powersums={j: power_partial_sum(n, j, alpha) for j in coeffs},
        m_cutoff=divergent_power_cutoff(alpha),
        truncation_degree=k,
        tail_bound=0.0,
    )


def series_expansion(series: AnalyticSeries, n: int, alpha: float,
                     dist: DistributionSpec, tail_tol: float = 1e-9) -> ExpansionReport:
    """Aggregate the power decompositions over a series' coefficients.

    The truncation degree follows the same per-site tail policy as the
    numeric trace: N * sum_{l>K} |c_l| (2+C_X)^l <= tail_tol.  The
    report's growing part carries the aggregated coefficients up to the
    divergence cutoff; everything else lands in ``remainder``.
    """
    require_radius(series, dist.bound)
    degree = series.truncation_degree(dist.bound + 2.0, tail_tol, scale=n)
    if degree > DEFAULT_POWER_CAP:
        raise ValueError(
            f"series truncation degree {degree} exceeds the exact-expansion cap "
            f"of {DEFAULT_POWER_CAP}; loosen tail_tol or use a polynomial"
        )
    tail = series.tail_majorant(degree, dist.bound + 2.0) * n
    coeffs = series.coefficients_upto(degree)

    linear = 0.0
    constant = 0.0
    boundary = 0.0
    placement = 0.0
    powersum_coeffs: dict[int, Fraction | float] = {j: Fraction(0) for j in range(1, degree + 1)}
    for l, c in enumerate(coeffs):
        if c == 0.0:
            continue
        if l == 0:
            linear += c
            continue
        lin, off = flat_free_constants(l)
        linear += c * lin
        constant += c * off
        boundary += c * boundary_correction(n, l, alpha, dist)
        placement += c * placement_correction(n, l, alpha, dist)
        for j in range(1, l + 1):
            powersum_coeffs[j] = powersum_coeffs[j] + c * power_sum_coefficient(l, j, dist)
    return ExpansionReport(
        kind="series",
        label=series.label,
        n_sites=n,
        alpha=alpha,
        dist_name=dist.name,
        linear_coeff=linear,
        constant_coeff=constant,
        boundary=boundary,
        placement=placement,
        powersum_coeffs={j: float(c) for j, c in powersum_coeffs.items()},
        powersums={j: power_partial_sum(n, j, alpha) for j in powersum_coeffs},
        m_cutoff=divergent_power_cutoff(alpha),
        truncation_degree=degree,
        tail_bound=tail,
    )


def exact_mean_trace_f(series: AnalyticSeries, n: int, alpha: float,
                       dist: DistributionSpec, tail_tol: float = 1e-9) -> float:
    """E[Tr f(H)] by summing exact power means against the coefficients."""
    require_radius(series, dist.bound)
    degree = series.truncation_degree(dist.bound + 2.0, tail_tol, scale=n)
    parts = []
    for l, c in enumerate(series.coefficients_upto(degree)):
        if c == 0.0:
            continue
        parts.append(c * exact_mean_trace_power(n, l, alpha, dist))
    return math.fsum(parts)
