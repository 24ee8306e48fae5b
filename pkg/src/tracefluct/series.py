"""Analytic test functions given by Taylor coefficients around the origin.

A series is classified into one of three fluctuation cases:

* ``A`` -- general coefficients (critical decay exponent 1/2),
* ``B`` -- even coefficients only (critical exponent 1/4),
* ``C`` -- odd coefficients only, with the linear coefficient tuned to
  cancel the single-flat contribution of the higher odd powers
  (critical exponent 1/6).

Polynomials are classified automatically; infinite series carry an
explicit tag.  The convergence radius must exceed ``bound + 2`` for the
operator norm of the series to converge on the operators built here;
that check happens where a distribution is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .combinatorics import single_flat_count

CASE_A = "A"
CASE_B = "B"
CASE_C = "C"
CASE_POLYNOMIAL = "polynomial"

#: critical decay exponent per fluctuation case
ALPHA_CRITICAL = {CASE_A: 1 / 2, CASE_B: 1 / 4, CASE_C: 1 / 6}

_MAX_TAIL_TERMS = 500


def _exponential_coefficient(rate: float, j: int) -> float:
    """rate^j / j!, evaluated in log space to survive large j."""
    if rate == 0.0:
        return 1.0 if j == 0 else 0.0
    if j == 0:
        return 1.0
    mag = math.exp(j * math.log(abs(rate)) - math.lgamma(j + 1))
    return -mag if (rate < 0 and j % 2 == 1) else mag


def classify_polynomial(coeffs: Sequence[float]) -> str:
    """Fluctuation case of a polynomial from its coefficient pattern."""
    odd = [c for j, c in enumerate(coeffs) if j % 2 == 1]
    even = [c for j, c in enumerate(coeffs) if j % 2 == 0]
    if any(even) and not any(odd):
        return CASE_B
    if any(odd) and not any(even):
        c1 = coeffs[1] if len(coeffs) > 1 else 0.0
        cancel = -sum(
            coeffs[j] * single_flat_count(j) for j in range(3, len(coeffs), 2)
        )
        if cancel != 0 and math.isclose(c1, cancel, rel_tol=1e-12, abs_tol=1e-12):
            return CASE_C
    return CASE_A


@dataclass(frozen=True)
class AnalyticSeries:
    """Taylor series sum_j c_j x^j with radius ``radius`` around the origin.

    ``degree`` is None for a genuinely infinite series; then ``coeff_fn``
    supplies the coefficients.  ``case`` is the fluctuation case tag.
    """

    label: str
    radius: float
    case: str
    degree: int | None = None
    coeffs: tuple[float, ...] | None = None
    coeff_fn: Callable[[int], float] | None = None

    def __post_init__(self) -> None:
        if self.case not in (CASE_A, CASE_B, CASE_C, CASE_POLYNOMIAL):
            raise ValueError(f"unknown case tag {self.case!r}")
        if (self.degree is None) == (self.coeffs is not None):
            raise ValueError("provide either a finite coefficient tuple or a coeff_fn")
        if self.coeffs is not None:
            if self.case == CASE_B and any(
                c != 0 for j, c in enumerate(self.coeffs) if j % 2 == 1
            ):
                raise ValueError("case B requires vanishing odd coefficients")
            if self.case == CASE_C:
                if any(c != 0 for j, c in enumerate(self.coeffs) if j % 2 == 0):
                    raise ValueError("case C requires vanishing even coefficients")
                if classify_polynomial(self.coeffs) != CASE_C:
                    raise ValueError(
                        "case C requires the linear coefficient to cancel the "
                        "single-flat contribution of the odd powers"
                    )

    # -- constructors ------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], label: str | None = None,
                   case: str | None = None) -> "AnalyticSeries":
        cs = tuple(float(c) for c in coeffs)
        while cs and cs[-1] == 0.0:
            cs = cs[:-1]
        if not cs:
            cs = (0.0,)
        if label is None:
            label = "poly:" + ",".join(f"{c:g}" for c in cs)
        return cls(
            label=label,
            radius=math.inf,
            case=case if case is not None else classify_polynomial(cs),
            degree=len(cs) - 1,
            coeffs=cs,
        )

    @classmethod
    def monomial(cls, power: int, scale: float = 1.0) -> "AnalyticSeries":
        coeffs = [0.0] * power + [scale]
        return cls.polynomial(coeffs, label=f"{scale:g}*x^{power}" if scale != 1.0 else f"x^{power}")

    @classmethod
    def exponential(cls, rate: float, label: str | None = None) -> "AnalyticSeries":
        """exp(rate*x); entire, so any operator bound is admissible."""
        return cls(
            label=label or f"exp({rate:g}x)",
            radius=math.inf,
            case=CASE_A,
            coeff_fn=lambda j: _exponential_coefficient(rate, j),
        )

    @classmethod
    def from_coefficients(cls, coeff_fn: Callable[[int], float], radius: float,
                          case: str, label: str) -> "AnalyticSeries":
        return cls(label=label, radius=radius, case=case, coeff_fn=coeff_fn)

    # -- coefficient access --------------------------------------------------

    def coefficient(self, j: int) -> float:
        if j < 0:
            raise ValueError("coefficient index must be >= 0")
        if self.coeffs is not None:
            return self.coeffs[j] if j <= self.degree else 0.0
        return self.coeff_fn(j)

    def coefficients_upto(self, k: int) -> list[float]:
        return [self.coefficient(j) for j in range(k + 1)]

    @property
    def is_polynomial(self) -> bool:
        return self.degree is not None

    @property
    def alpha_critical(self) -> float:
        if self.case == CASE_POLYNOMIAL:
            raise ValueError("polynomial-tagged series have no single critical exponent")
        return ALPHA_CRITICAL[self.case]

    # -- tails ----------------------------------------------------------------

    def tail_majorant(self, k: int, x: float) -> float:
        """Upper bound on sum_{j>k} |c_j| x^j, summed numerically.

        Zero for polynomials.  For infinite series the terms must decay
        geometrically before the term budget runs out; otherwise the tail
        cannot be certified and a ValueError is raised.
        """
        if self.is_polynomial:
            return 0.0
        total = 0.0
        prev = None
        for j in range(k + 1, k + 1 + _MAX_TAIL_TERMS):
            term = abs(self.coefficient(j)) * x**j
            total += term
            if prev is not None and term < 1e-300:
                return total
            if prev is not None and prev > 0 and term / prev < 0.5:
                # geometric regime: close with the geometric tail bound
                ratio = term / prev
                return total + term * ratio / (1.0 - ratio)
            prev = term
        raise ValueError(
            f"tail of {self.label} did not enter a geometric regime within "
            f"{_MAX_TAIL_TERMS} terms at x={x:g}"
        )

    def truncation_degree(self, x: float, tol: float, scale: float = 1.0,
                          max_degree: int = 200) -> int:
        """Smallest degree K with scale * tail_majorant(K, x) <= tol."""
        if self.is_polynomial:
            return self.degree
        for k in range(max_degree + 1):
            if scale * self.tail_majorant(k, x) <= tol:
                return k
        raise ValueError(
            f"no truncation of {self.label} at x={x:g} meets tolerance {tol:g} "
            f"within degree {max_degree}"
        )

    def evaluate(self, x: float) -> float:
        """Pointwise value, for diagnostics; |x| must be inside the radius."""
        if abs(x) >= self.radius:
            raise ValueError("argument outside the convergence radius")
        if self.is_polynomial:
            return sum(c * x**j for j, c in enumerate(self.coeffs))
        total = 0.0
        for j in range(_MAX_TAIL_TERMS):
            term = self.coefficient(j) * x**j
            total += term
            if j > 4 and abs(term) < 1e-17 * max(1.0, abs(total)):
                return total
        return total


def require_radius(series: AnalyticSeries, bound: float) -> None:
    """Reject series whose radius does not dominate the operator norm bound."""
    if series.radius <= bound + 2.0:
        raise ValueError(
            f"series {series.label} has radius {series.radius:g} <= {bound + 2:g}; "
            "the operator series does not converge"
        )
