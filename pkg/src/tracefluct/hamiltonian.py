"""Numeric side: sampled decaying potentials and traces of operator powers.

The operator on n = 1..N sites is symmetric tridiagonal with unit
hopping and diagonal V(n) = X_n / n^alpha (free boundary: site 1 couples
only to site 2).  Its spectrum lies in [-2-C_X, 2+C_X] when |X| <= C_X.

Sampling is counter-based (Philox keyed by the seed, one uniform per
site), so the first N values of a sample are identical for every larger
size drawn from the same seed.  That prefix stability is what lets one
realisation be followed across a growing size grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .distributions import DistributionSpec
from .series import AnalyticSeries, require_radius

_OVERFLOW_LIMIT = 1e300


def derive_seed(base_seed: int, index: int) -> int:
    """Stable 64-bit stream seed for (base_seed, index)."""
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class PotentialSample:
    """One realisation V(1..N) of the decaying random potential."""

    n_sites: int
    alpha: float
    seed: int
    dist: DistributionSpec
    xs: np.ndarray      # the raw i.i.d. draws X_1..X_N
    values: np.ndarray  # V(n) = X_n / n^alpha

    def prefix(self, n: int) -> "PotentialSample":
        """The same realisation restricted to its first n sites."""
        if n > self.n_sites:
            raise ValueError("prefix longer than the sample")
        return PotentialSample(
            n_sites=n, alpha=self.alpha, seed=self.seed, dist=self.dist,
            xs=self.xs[:n], values=self.values[:n],
        )


def sample_potential(n_sites: int, alpha: float, dist: DistributionSpec, seed: int) -> PotentialSample:
    """Draw V(n) = X_n / n^alpha for n = 1..n_sites, prefix-stable in the seed."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    if alpha <= 0:
        raise ValueError("the decay exponent must be positive")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    xs = dist.sample_xs(rng, n_sites)
    sites = np.arange(1, n_sites + 1, dtype=float)
    return PotentialSample(
        n_sites=n_sites, alpha=alpha, seed=seed, dist=dist,
        xs=xs, values=xs / sites**alpha,
    )


def _as_values(sample) -> np.ndarray:
    values = getattr(sample, "values", sample)
    return np.asarray(values, dtype=float)


def trace_moments(sample, k_max: int) -> np.ndarray:
    """[Tr H^0, ..., Tr H^k_max] via banded powers of the tridiagonal operator.

    Maintains the diagonals of H^j (bandwidth j) and multiplies by H once
    per power: O(N * k_max^2) time, O(N * k_max) memory.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    v = _as_values(sample)
    n = v.size
    traces = np.empty(k_max + 1)
    # diagonals of H^j keyed by offset d: band[d][i] = (H^j)_{i, i+d}, zero-padded
    band: dict[int, np.ndarray] = {0: np.ones(n)}
    traces[0] = n
    for j in range(1, k_max + 1):
        new: dict[int, np.ndarray] = {}
        with np.errstate(over="ignore"):  # the guard below raises on overflow
            for d in range(-j, j + 1):
                acc = np.zeros(n)
                upper = band.get(d + 1)
                if upper is not None:
                    acc[1:] += upper[:-1]
                lower = band.get(d - 1)
                if lower is not None:
                    acc[:-1] += lower[1:]
                mid = band.get(d)
                if mid is not None:
                    acc += v * mid
                new[d] = acc
        band = new
        diag_max = max(np.max(np.abs(arr)) for arr in band.values())
        if not np.isfinite(diag_max) or diag_max > _OVERFLOW_LIMIT:
            raise OverflowError(
                f"entries of H^{j} exceed {_OVERFLOW_LIMIT:g} (max {diag_max:g}); aborting"
            )
        traces[j] = band[0].sum()
    return traces


def eigenvalues(sample, tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues, ascending, of the symmetric tridiagonal operator.

    Uses bisection driven by Sturm-sequence counts (LAPACK stebz), which
    locates every eigenvalue to within ``tol`` with an exact count.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    v = _as_values(sample)
    off = np.ones(max(v.size - 1, 0))
    w = eigh_tridiagonal(v, off, eigvals_only=True, lapack_driver="stebz", tol=tol)
    return np.sort(w)


@dataclass(frozen=True)
class TraceFResult:
    value: float
    degree: int
    tail_bound: float


def trace_f(sample, series: AnalyticSeries, degree: int | None = None,
            tail_tol: float = 1e-9) -> TraceFResult:
    """Tr f(H) for a sampled operator, by truncating the coefficient series.

    The truncation degree K is chosen so that the crude per-site bound
    N * sum_{j>K} |c_j| (2+C_X)^j falls below ``tail_tol`` (polynomials
    truncate at their degree, tail bound zero).  Pass ``degree`` to pin
    K explicitly.
    """
    v = _as_values(sample)
    dist = getattr(sample, "dist", None)
    bound = dist.bound if dist is not None else float(np.max(np.abs(v))) if v.size else 0.0
    require_radius(series, bound)
    x = bound + 2.0
    if degree is None:
        degree = series.truncation_degree(x, tail_tol, scale=v.size)
    tail = series.tail_majorant(degree, x) * v.size
    moments = trace_moments(v, degree)
    coeffs = series.coefficients_upto(degree)
    value = math.fsum(c * m for c, m in zip(coeffs, moments) if c != 0.0)
    return TraceFResult(value=value, degree=degree, tail_bound=tail)


def dense_matrix(values) -> np.ndarray:
    """Dense N x N form of the operator; for small-N cross-checks."""
    v = _as_values(values)
    h = np.diag(v)
    n = v.size
    if n > 1:
        idx = np.arange(n - 1)
        h[idx, idx + 1] = 1.0
        h[idx + 1, idx] = 1.0
    return h
