"""Hierarchical animal -> unit-of-observation simulator.

Each animal's true effect is drawn from ``Normal(mu_pop, sigma_animal**2)`` and
each of its units from ``Normal(effect, sigma_uo**2)``.  Simulated datasets
are analysed three ways:

* ``pooled-fixed``: one t-test across all units, ignoring animals;
* ``random-across-animals``: a t-test across per-animal means;
* ``conjunction-all-significant``: a one-sided t-test per animal, rejecting
  when every animal is significant.

Monte Carlo replications use the block substreams of :mod:`fewn.streams`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .conjunction import TypicalityResult, partial_conjunction_bound
from .errors import ContractError, DomainError, InsufficientDataError
from .numeric import check_probability
from .planner import MIN_REPS, mc_halfwidth
from .sample_tests import (
    EffectSample,
    Sidedness,
    TestResult,
    batch_reject,
    batch_t_statistics,
    critical_value,
    paired_t_test,
    pool_samples,
)
from .streams import check_seed, map_blocks

__all__ = [
    "ErrorRateReport",
    "HierarchicalDesign",
    "Method",
    "SimulatedDataset",
    "estimate_error_rates",
    "run_conjunction",
    "run_pooled_fixed",
    "run_random_effect",
    "simulate_dataset",
]


class Method(str, Enum):
    POOLED_FIXED = "pooled-fixed"
    RANDOM = "random-across-animals"
    CONJUNCTION = "conjunction-all-significant"

    @classmethod
    def parse(cls, value) -> "Method":
        try:
            return cls(value)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown method {value!r}; valid methods: {valid}") from None


@dataclass(frozen=True)
class HierarchicalDesign:
    mu_pop: float
    sigma_animal: float
    sigma_uo: float
    uo_counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.uo_counts)
        if not counts:
            raise DomainError("uo_counts must name at least one animal")
        for c in counts:
            if isinstance(c, bool) or int(c) != c or c < 2:
                raise DomainError(f"every uo count must be an integer >= 2, got {c!r}")
        object.__setattr__(self, "uo_counts", tuple(int(c) for c in counts))
        if not math.isfinite(self.mu_pop):
            raise DomainError("mu_pop must be finite")
        for name in ("sigma_animal", "sigma_uo"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def n_animals(self) -> int:
        return len(self.uo_counts)

    @classmethod
    def from_dict(cls, d: dict) -> "HierarchicalDesign":
        try:
            return cls(float(d["mu_pop"]), float(d["sigma_animal"]), float(d["sigma_uo"]),
                       tuple(d["uo_counts"]))
        except KeyError as exc:
            raise DomainError(f"design is missing field {exc.args[0]!r}") from None

    def to_dict(self) -> dict:
        return {
            "mu_pop": self.mu_pop,
            "sigma_animal": self.sigma_animal,
            "sigma_uo": self.sigma_uo,
            "uo_counts": list(self.uo_counts),
        }


@dataclass(frozen=True)
class SimulatedDataset:
    samples: tuple[EffectSample, ...]
    true_animal_effects: tuple[float, ...]
    seed: int | None = None


@dataclass(frozen=True)
class ErrorRateReport:
    method: Method
    rejection_rate: float
    reps: int
    rejections: int
    mc_halfwidth_95: float
    degenerate_count: int

    @property
    def mc_standard_error(self) -> float:
        r = self.rejection_rate
        return math.sqrt(r * (1.0 - r) / self.reps)


def _draw(design: HierarchicalDesign, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    effects = design.mu_pop + design.sigma_animal * rng.standard_normal((size, design.n_animals))
    noise = rng.standard_normal((size, sum(design.uo_counts)))
    values = np.repeat(effects, design.uo_counts, axis=1) + design.sigma_uo * noise
    return effects, values


def simulate_dataset(design: HierarchicalDesign, seed: int) -> SimulatedDataset:
    """Draw one dataset; identical seeds give bit-identical datasets."""
    seed = check_seed(seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    effects, values = _draw(design, rng, 1)
    bounds = np.cumsum((0,) + design.uo_counts)
    samples = tuple(
        EffectSample(tuple(values[0, lo:hi].tolist()), f"animal-{i + 1}")
        for i, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:]))
    )
    return SimulatedDataset(samples, tuple(effects[0].tolist()), seed)


def run_pooled_fixed(dataset: SimulatedDataset, alpha: float = 0.05,
                     sidedness: Sidedness | str = Sidedness.TWO) -> TestResult:
    """Pool every animal's units and t-test them as one sample."""
    return paired_t_test(pool_samples(dataset.samples), alpha, sidedness)


def animal_means(dataset: SimulatedDataset) -> EffectSample:
    return EffectSample(tuple(s.mean for s in dataset.samples), "animal means",
                        tuple((s.label, 1) for s in dataset.samples))


def run_random_effect(dataset: SimulatedDataset, alpha: float = 0.05,
                      sidedness: Sidedness | str = Sidedness.TWO) -> TestResult:
    """Average within each animal, then t-test across animals."""
    if len(dataset.samples) < 2:
        raise InsufficientDataError("a random-effect test needs at least 2 animals")
    return paired_t_test(animal_means(dataset), alpha, sidedness)


def _require_direction(sidedness: Sidedness) -> None:
    if not sidedness.one_sided:
        raise ContractError("conjunction analysis needs a one-sided test with the direction fixed in advance")


def run_conjunction(
    dataset: SimulatedDataset,
    alpha: float = 0.05,
    sidedness: Sidedness | str = Sidedness.POSITIVE,
    beta: float = 1.0,
    p_crit: float = 0.05,
) -> tuple[int, TypicalityResult]:
    """Test each animal separately and bound typicality from the significant count."""
    sidedness = Sidedness.parse(sidedness)
    _require_direction(sidedness)
    k = sum(paired_t_test(s, alpha, sidedness).significant for s in dataset.samples)
    return k, partial_conjunction_bound(k, len(dataset.samples), alpha, beta, p_crit)


def _block_tally(design, methods, alpha, sidedness):
    crit_pooled = critical_value(alpha, sidedness, sum(design.uo_counts) - 1)
    crit_random = critical_value(alpha, sidedness, design.n_animals - 1) if design.n_animals >= 2 else None
    crit_animal = [critical_value(alpha, sidedness, c - 1) for c in design.uo_counts]
    bounds = np.cumsum((0,) + design.uo_counts)

    def tally(rng: np.random.Generator, size: int) -> dict:
        _, values = _draw(design, rng, size)
        out = {}
        if Method.POOLED_FIXED in methods:
            stat, deg = batch_t_statistics(values)
            out[Method.POOLED_FIXED] = (int(batch_reject(stat, crit_pooled, sidedness).sum()), int(deg.sum()))
        if Method.RANDOM in methods:
            means = np.add.reduceat(values, bounds[:-1], axis=1) / np.asarray(design.uo_counts)
            stat, deg = batch_t_statistics(means)
            out[Method.RANDOM] = (int(batch_reject(stat, crit_random, sidedness).sum()), int(deg.sum()))
        if Method.CONJUNCTION in methods:
            all_sig = np.ones(size, dtype=bool)
            any_deg = np.zeros(size, dtype=bool)
            for i, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
                stat, deg = batch_t_statistics(values[:, lo:hi])
                all_sig &= batch_reject(stat, crit_animal[i], sidedness)
                any_deg |= deg
            out[Method.CONJUNCTION] = (int((all_sig & ~any_deg).sum()), int(any_deg.sum()))
        return out

    return tally


def estimate_error_rates(
    design: HierarchicalDesign,
    methods: Iterable[Method | str] = tuple(Method),
    alpha: float = 0.05,
    sidedness: Sidedness | str = Sidedness.TWO,
    reps: int = 10000,
    seed: int = 0,
    workers: int = 1,
) -> list[ErrorRateReport]:
    """Empirical rejection rate of each analysis method over ``reps`` simulated datasets.

    Degenerate replications (zero spread in a tested sample) are counted in
    ``degenerate_count`` and never as rejections; the rate's denominator is
    always ``reps``.
    """
    methods = list(dict.fromkeys(Method.parse(m) for m in methods))
    if not methods:
        raise DomainError("at least one method is required")
    alpha = check_probability("alpha", alpha, open_interval=True)
    sidedness = Sidedness.parse(sidedness)
    if reps < MIN_REPS:
        raise DomainError(f"reps must be at least {MIN_REPS}, got {reps}")
    if Method.RANDOM in methods and design.n_animals < 2:
        raise InsufficientDataError("random-across-animals needs at least 2 animals")
    if Method.CONJUNCTION in methods:
        _require_direction(sidedness)
    seed = check_seed(seed)

    tallies = map_blocks(_block_tally(design, set(methods), alpha, sidedness), reps, seed, workers)
    reports = []
    for m in methods:
        rejections = sum(t[m][0] for t in tallies)
        degenerate = sum(t[m][1] for t in tallies)
        rate = rejections / reps
        reports.append(ErrorRateReport(m, rate, reps, rejections, mc_halfwidth(rate, reps), degenerate))
    return reports


def null_rejection_rate(method: Method | str, design: HierarchicalDesign, alpha: float) -> float:
    """Exact size of a method when every animal's true effect is zero.

    Single tests reject at ``alpha``; the all-significant conjunction of
    independent per-animal tests rejects at ``alpha ** n_animals``.
    """
    if Method.parse(method) is Method.CONJUNCTION:
        return alpha ** design.n_animals
    return alpha
