"""Typicality bounds from conjunctions of per-animal significant tests.

If a fraction ``gamma`` of the animal population truly shows an effect, each
animal's fixed-effect test is significant with probability
``alpha * (1 - gamma) + beta * gamma``.  Fixing the probability that all N
tests come out significant at ``p_crit`` and solving for ``gamma`` gives the
lower bound ``gamma_c`` on typicality; inverting the same relation gives the
number of animals needed to reach a desired bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError
from .numeric import binom_tail, bisect, check_probability

__all__ = [
    "ConjunctionQuery",
    "Figure1Row",
    "RequiredN",
    "TypicalityResult",
    "figure1_table",
    "partial_conjunction_bound",
    "prob_all_significant",
    "required_n",
    "typicality_lower_bound",
]

BISECTION_TOL = 1e-13
# Relative slack for treating a real-valued N as an exact integer.
INTEGER_SNAP = 1e-9


@dataclass(frozen=True)
class ConjunctionQuery:
    n_significant: int
    n_total: int
    alpha: float = 0.05
    beta: float = 1.0
    p_crit: float = 0.05

    def __post_init__(self):
        for name in ("n_significant", "n_total"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise DomainError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n_total < 1:
            raise DomainError("n_total must be at least 1")
        if not 0 <= self.n_significant <= self.n_total:
            raise DomainError(f"need 0 <= k <= N, got k={self.n_significant}, N={self.n_total}")
        alpha = check_probability("alpha", self.alpha)
        beta = check_probability("beta", self.beta)
        check_probability("p_crit", self.p_crit, open_interval=True)
        if beta <= alpha:
            raise DomainError(f"beta ({beta}) must exceed alpha ({alpha})")

    def q(self, gamma: float) -> float:
        """Per-animal probability of a significant test at typicality ``gamma``."""
        return self.alpha * (1.0 - gamma) + self.beta * gamma


@dataclass(frozen=True)
class TypicalityResult:
    """``weak_evidence``: the bound is 0 because the observed k is too weak to
    exclude zero typicality.  ``saturated``: the unconstrained bound exceeds 1
    (possible only with beta < 1) and was clamped.
    """

    gamma_c: float
    query: ConjunctionQuery
    method: str
    weak_evidence: bool = False
    saturated: bool = False


class RequiredN(NamedTuple):
    n_real: float
    n_int: int


class Figure1Row(NamedTuple):
    gamma_c: float
    n_real: float
    n_int: int


def _warn_beta(beta: float) -> None:
    if beta < 1.0:
        warnings.warn(
            "beta < 1 lets non-significant animals be written off as misses, so the "
            "typicality bound grows without limit as beta decreases; beta = 1 is the "
            "conservative choice",
            UserWarning,
            stacklevel=3,
        )


def prob_all_significant(n: int, gamma: float, alpha: float = 0.05, beta: float = 1.0) -> float:
    """[alpha (1 - gamma) + beta gamma] ** n."""
    gamma = check_probability("gamma", gamma)
    alpha = check_probability("alpha", alpha)
    beta = check_probability("beta", beta)
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    return (alpha * (1.0 - gamma) + beta * gamma) ** int(n)


def typicality_lower_bound(
    n: int,
    alpha: float = 0.05,
    beta: float = 1.0,
    p_crit: float = 0.05,
    method: str = "closed-form",
) -> TypicalityResult:
    """Lower bound on typicality when all ``n`` animals test significant.

    ``method="closed-form"`` uses ``(p_crit**(1/n) - alpha) / (beta - alpha)``;
    ``method="bisection"`` solves ``prob_all_significant(n, g) = p_crit``
    numerically.  Both clamp to [0, 1].
    """
    query = ConjunctionQuery(n, n, alpha, beta, p_crit)
    _warn_beta(query.beta)
    if method == "closed-form":
        raw = (query.p_crit ** (1.0 / query.n_total) - query.alpha) / (query.beta - query.alpha)
        gamma = min(1.0, max(0.0, raw))
        return TypicalityResult(gamma, query, method, weak_evidence=raw <= 0.0, saturated=raw > 1.0)
    if method == "bisection":
        return _bisect_bound(query)
    raise DomainError(f"unknown method {method!r}")


def _bisect_bound(query: ConjunctionQuery) -> TypicalityResult:
    k, n = query.n_significant, query.n_total

    def excess(gamma: float) -> float:
        return binom_tail(k, n, query.q(gamma)) - query.p_crit

    if k == 0 or excess(0.0) >= 0.0:
        return TypicalityResult(0.0, query, "bisection", weak_evidence=True)
    if excess(1.0) < 0.0:
        return TypicalityResult(1.0, query, "bisection", saturated=True)
    gamma = bisect(excess, 0.0, 1.0, BISECTION_TOL)
    return TypicalityResult(gamma, query, "bisection")


def partial_conjunction_bound(
    k: int,
    n: int,
    alpha: float = 0.05,
    beta: float = 1.0,
    p_crit: float = 0.05,
) -> TypicalityResult:
    """Typicality bound when ``k`` of ``n`` animals test significant.

    The bound is the smallest ``gamma`` at which observing at least ``k``
    significant animals has probability ``p_crit`` or more.  For ``k == n``
    this is the all-significant bound.
    """
    query = ConjunctionQuery(k, n, alpha, beta, p_crit)
    _warn_beta(query.beta)
    return _bisect_bound(query)


def required_n(
    gamma_c: float,
    alpha: float = 0.05,
    beta: float = 1.0,
    p_crit: float = 0.05,
) -> RequiredN:
    """Animals needed for an all-significant conjunction to bound typicality at ``gamma_c``.

    ``n_real = ln(p_crit) / ln(alpha + (beta - alpha) gamma_c)``; ``n_int`` is
    its ceiling, with values within 1e-9 (relative) of an integer taken as
    that integer.
    """
    gamma_c = check_probability("gamma_c", gamma_c)
    alpha = check_probability("alpha", alpha)
    beta = check_probability("beta", beta)
    p_crit = check_probability("p_crit", p_crit, open_interval=True)
    if beta <= alpha:
        raise DomainError(f"beta ({beta}) must exceed alpha ({alpha})")
    base = alpha + (beta - alpha) * gamma_c
    if not 0.0 < base < 1.0:
        raise DomainError(
            f"alpha + (beta - alpha) * gamma_c = {base} must lie in (0, 1); "
            "no finite number of animals reaches this bound"
        )
    n_real = math.log(p_crit) / math.log(base)
    nearest = round(n_real)
    if abs(n_real - nearest) <= INTEGER_SNAP * max(1.0, abs(n_real)):
        n_int = int(nearest)
    else:
        n_int = math.ceil(n_real)
    return RequiredN(n_real, max(1, n_int))


def gamma_grid(gamma_min: float, gamma_max: float, step: float) -> list[float]:
    """Evenly spaced grid including both ends when they fall on the step."""
    count = math.floor((gamma_max - gamma_min) / step + 1e-9) + 1
    return [round(gamma_min + i * step, 12) for i in range(count)]


def figure1_table(
    gamma_min: float = 0.01,
    gamma_max: float = 0.95,
    step: float = 0.01,
    alpha: float = 0.05,
    beta: float = 1.0,
    p_crit: float = 0.05,
) -> list[Figure1Row]:
    """Required animals (real-valued and whole) over a grid of typicality bounds."""
    if not (0.0 < gamma_min < gamma_max < 1.0):
        raise DomainError(f"need 0 < gamma_min < gamma_max < 1, got [{gamma_min}, {gamma_max}]")
    if not step > 0:
        raise DomainError("step must be positive")
    rows = []
    for g in gamma_grid(gamma_min, gamma_max, step):
        n_real, n_int = required_n(g, alpha, beta, p_crit)
        rows.append(Figure1Row(g, n_real, n_int))
    return rows
