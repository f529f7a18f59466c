"""Minimum-N and sensitivity calculators for random-effect tests across animals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .numeric import check_probability
from .sample_tests import Sidedness, batch_reject, batch_t_statistics, critical_value
from .streams import check_seed, map_blocks

__all__ = [
    "DEFAULT_CAP",
    "PowerEstimate",
    "PowerQuery",
    "min_n_power",
    "min_n_sample_d",
    "min_n_sign",
    "power_t_mc",
    "second_animal_window",
]

DEFAULT_CAP = 10000
MIN_REPS = 1000
NOISE_MARGIN = 0.01


def _smallest_passing(passes: Callable[[int], bool], start: int, cap: int) -> Optional[int]:
    # Assumes passes() is monotone in n: gallop upward, then bisect.
    if passes(start):
        return start
    if cap <= start or not passes(cap):
        return None
    lo, hi = start, min(2 * start, cap)
    while not passes(hi):
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def min_n_sample_d(
    sample_d: float,
    alpha: float = 0.05,
    sidedness: Sidedness | str = Sidedness.TWO,
    cap: int = DEFAULT_CAP,
) -> Optional[int]:
    """Smallest N >= 2 at which a sample Cohen's d of ``sample_d`` reaches significance.

    Returns None when no N up to ``cap`` suffices.
    """
    sample_d = float(sample_d)
    if not math.isfinite(sample_d) or sample_d <= 0:
        raise DomainError(f"sample_d must be positive, got {sample_d!r}")
    alpha = check_probability("alpha", alpha, open_interval=True)
    sidedness = Sidedness.parse(sidedness)

    def passes(n: int) -> bool:
        return math.sqrt(n) * sample_d >= critical_value(alpha, sidedness, n - 1)

    return _smallest_passing(passes, 2, cap)


def second_animal_window(first_diff: float, alpha: float = 0.05) -> tuple[float, float]:
    """Range of second-animal differences that make a two-animal, two-sided t-test significant.

    With two animals the statistic is ``(d1 + d2) / |d1 - d2|``; solving it
    against the critical value ``t`` gives ``d1 (t-1)/(t+1) <= d2 <= d1 (t+1)/(t-1)``.
    """
    first_diff = float(first_diff)
    if not math.isfinite(first_diff) or first_diff <= 0:
        raise DomainError(f"first_diff must be positive, got {first_diff!r}")
    alpha = check_probability("alpha", alpha, open_interval=True)
    t = critical_value(alpha, Sidedness.TWO, 1)
    # alpha >= 0.5 puts the df=1 critical value at or below 1 (within quantile tolerance).
    if t <= 1.0 + 1e-8:
        raise DomainError(f"alpha={alpha} gives a critical value <= 1; the window is unbounded")
    return first_diff * (t - 1.0) / (t + 1.0), first_diff * (t + 1.0) / (t - 1.0)


def min_n_sign(alpha: float = 0.05, sidedness: Sidedness | str = Sidedness.TWO) -> int:
    """Fewest animals for which a unanimous sign test can reach ``p < alpha``."""
    alpha = check_probability("alpha", alpha, open_interval=True)
    factor = 1.0 if Sidedness.parse(sidedness).one_sided else 2.0
    n = 1
    while factor * 0.5**n >= alpha:
        n += 1
    return n


@dataclass(frozen=True)
class PowerQuery:
    population_d: float
    n: int
    alpha: float = 0.05
    sidedness: Sidedness = Sidedness.TWO
    target_power: float = 0.8

    def __post_init__(self):
        if not math.isfinite(self.population_d):
            raise DomainError("population_d must be finite")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        check_probability("alpha", self.alpha, open_interval=True)
        check_probability("target_power", self.target_power, open_interval=True)
        object.__setattr__(self, "sidedness", Sidedness.parse(self.sidedness))


@dataclass(frozen=True)
class PowerEstimate:
    power: float
    mc_reps: int
    mc_halfwidth_95: float
    seed: int
    rejections: int
    degenerate_count: int = 0

    @property
    def lower_bound_95(self) -> float:
        return self.power - self.mc_halfwidth_95


def mc_halfwidth(rate: float, reps: int) -> float:
    return 1.96 * math.sqrt(rate * (1.0 - rate) / reps)


def power_t_mc(query: PowerQuery, reps: int = 10000, seed: int = 0, workers: int = 1) -> PowerEstimate:
    """Monte Carlo sensitivity of the across-animal t-test.

    Each replication draws ``n`` animal effects from ``Normal(population_d, 1)``
    and applies the paired t-test at ``query.alpha``.  Degenerate draws are
    tallied separately and never counted as rejections.
    """
    if reps < MIN_REPS:
        raise DomainError(f"reps must be at least {MIN_REPS}, got {reps}")
    seed = check_seed(seed)
    crit = critical_value(query.alpha, query.sidedness, query.n - 1)

    def block(rng: np.random.Generator, size: int) -> tuple[int, int]:
        x = rng.standard_normal((size, query.n)) + query.population_d
        stat, degenerate = batch_t_statistics(x)
        return int(batch_reject(stat, crit, query.sidedness).sum()), int(degenerate.sum())

    tallies = map_blocks(block, reps, seed, workers)
    rejections = sum(r for r, _ in tallies)
    degenerate = sum(d for _, d in tallies)
    power = rejections / reps
    return PowerEstimate(power, reps, mc_halfwidth(power, reps), seed, rejections, degenerate)


def min_n_power(
    population_d: float,
    target_power: float = 0.8,
    alpha: float = 0.05,
    sidedness: Sidedness | str = Sidedness.TWO,
    reps: int = 10000,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> Optional[int]:
    """Smallest number of animals whose simulated power reaches ``target_power``.

    ``n`` qualifies once the lower 95% Monte Carlo bound of its power clears
    ``target_power - 0.01``.  Every ``n`` is simulated with the same seed.
    Returns None if ``cap`` animals do not suffice.
    """
    population_d = float(population_d)
    if not math.isfinite(population_d) or population_d <= 0:
        raise DomainError(f"population_d must be positive, got {population_d!r}")
    target_power = check_probability("target_power", target_power, open_interval=True)
    sidedness = Sidedness.parse(sidedness)

    def passes(n: int) -> bool:
        est = power_t_mc(PowerQuery(population_d, n, alpha, sidedness, target_power), reps, seed, workers)
        return est.lower_bound_95 >= target_power - NOISE_MARGIN

    return _smallest_passing(passes, 2, cap)
