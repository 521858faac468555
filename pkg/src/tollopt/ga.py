"""Real-coded genetic algorithm for bound-constrained maximization.

Used as the inner solver for likelihood and acquisition maximization, where
one call must stay far cheaper than a single traffic simulation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass
class GAParams:
    population_size: int = 50
    generations: int = 40
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # default 1/d, resolved at run time
    mutation_scale: float = 0.1            # fraction of box width
    elitism: int = 2
    tournament_size: int = 3
    blend_alpha: float = 0.5               # BLX-alpha crossover expansion

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        for name in ("crossover_rate", "mutation_scale"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be smaller than the population size")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be at least 1")


def _as_box(box) -> tuple[np.ndarray, np.ndarray]:
    lower, upper = box
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if lower.shape != upper.shape:
        raise ValueError("box lower/upper must have the same shape")
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("box must be finite")
    if np.any(lower > upper):
        raise ValueError("box lower bound exceeds upper bound")
    return lower, upper


def ga_maximize(
    f: Callable[[np.ndarray], float],
    box,
    params: Optional[GAParams] = None,
    rng: Optional[np.random.Generator] = None,
    repair: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> tuple[np.ndarray, float]:
    """Maximize ``f`` over a box with tournament selection, blend crossover,
    Gaussian mutation, and elitism.

    ``repair`` (if given) maps any box point onto the feasible set and is
    applied before every evaluation, so only feasible points are ever scored
    or returned.  Non-finite objective values are discarded with a warning;
    if every candidate is non-finite the search fails.  Elite individuals are
    carried over without re-invoking ``f``.  Deterministic under a fixed
    generator state.
    """
    params = params or GAParams()
    params.validate()
    rng = rng or np.random.default_rng()
    lower, upper = _as_box(box)
    d = lower.size
    width = upper - lower
    mut_rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / d
    pop_size = params.population_size

    def prepare(x: np.ndarray) -> np.ndarray:
        x = np.clip(x, lower, upper)
        if repair is not None:
            x = np.clip(np.asarray(repair(x), dtype=float), lower, upper)
        return x

    saw_nonfinite = False

    def evaluate(x: np.ndarray) -> float:
        nonlocal saw_nonfinite
        val = float(f(x))
        if not np.isfinite(val):
            saw_nonfinite = True
            return -np.inf
        return val

    pop = np.array([prepare(lower + rng.uniform(size=d) * width) for _ in range(pop_size)])
    fitness = np.array([evaluate(x) for x in pop])

    best_idx = int(np.argmax(fitness))
    best_x = pop[best_idx].copy()
    best_f = fitness[best_idx]

    def tournament() -> int:
        contenders = rng.integers(0, pop_size, size=params.tournament_size)
        return int(contenders[np.argmax(fitness[contenders])])

    for _ in range(params.generations - 1):
        order = np.argsort(-fitness, kind="stable")
        new_pop = [pop[i].copy() for i in order[: params.elitism]]
        new_fit = [fitness[i] for i in order[: params.elitism]]
        while len(new_pop) < pop_size:
            pa = pop[tournament()]
            pb = pop[tournament()]
            if rng.uniform() < params.crossover_rate:
                lo = np.minimum(pa, pb)
                hi = np.maximum(pa, pb)
                spread = params.blend_alpha * (hi - lo)
                child = rng.uniform(lo - spread, hi + spread)
            else:
                child = pa.copy()
            mask = rng.uniform(size=d) < mut_rate
            if np.any(mask):
                child = child.copy()
                child[mask] += rng.normal(size=int(mask.sum())) * params.mutation_scale * width[mask]
            child = prepare(child)
            new_pop.append(child)
            new_fit.append(evaluate(child))
        pop = np.array(new_pop)
        fitness = np.array(new_fit)
        gen_best = int(np.argmax(fitness))
        if fitness[gen_best] > best_f:
            best_f = fitness[gen_best]
            best_x = pop[gen_best].copy()

    if not np.isfinite(best_f):
        raise RuntimeError("GA failed: every evaluated candidate was non-finite")
    if saw_nonfinite:
        warnings.warn("GA discarded candidates with non-finite objective values")
    return best_x, float(best_f)
