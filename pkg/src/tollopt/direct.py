"""Deterministic DIRECT (DIviding RECTangles) global minimization.

Serves as the derivative-free comparison baseline.  The search box is
normalized to the unit cube, the center is sampled first, and every iteration
trisects the potentially optimal hyperrectangles identified by the
lower-convex-hull conditions of Jones, Perttunen and Stuckman.  Constraints
are handled externally through a quadratic penalty wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_EPSILON = 1e-4


@dataclass
class HyperRect:
    """One cell of the partition; ``levels[i]`` counts trisections along dimension i."""

    center: np.ndarray
    levels: np.ndarray          # int per dimension; side_i = 3**(-levels[i])
    f_center: float
    index: int

    @property
    def side_lengths(self) -> np.ndarray:
        return 3.0 ** (-self.levels.astype(float))

    @property
    def diameter(self) -> float:
        # half the Euclidean norm of the sides; sorted so equal level multisets
        # produce bit-identical diameters and group exactly
        sides = np.sort(self.side_lengths)
        return 0.5 * float(np.linalg.norm(sides))


def potentially_optimal(rects: Sequence[HyperRect], f_min: float,
                        epsilon: float) -> list[HyperRect]:
    """Rectangles for which some K > 0 satisfies both Jones conditions.

    A rectangle j qualifies when ``f_j - K d_j <= f_i - K d_i`` for every
    rectangle i and ``f_j - K d_j <= f_min - epsilon |f_min|``.
    """
    diams = np.array([r.diameter for r in rects])
    fvals = np.array([r.f_center for r in rects])
    chosen = []
    for j, rect in enumerate(rects):
        dj, fj = diams[j], fvals[j]
        if not np.isfinite(fj):
            continue
        same = (diams == dj)
        if np.any(fvals[same] < fj):
            continue
        k_lo = (fj - f_min + epsilon * abs(f_min)) / dj
        smaller = diams < dj
        if np.any(smaller):
            k_lo = max(k_lo, float(np.max((fj - fvals[smaller]) / (dj - diams[smaller]))))
        larger = diams > dj
        k_hi = float(np.min((fvals[larger] - fj) / (diams[larger] - dj))) if np.any(larger) else math.inf
        if k_hi > 0.0 and k_lo <= k_hi:
            chosen.append(rect)
    return chosen


def direct_minimize(
    f: Callable[[np.ndarray], float],
    box,
    max_evals: int,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[np.ndarray, float, list[tuple[int, float]]]:
    """Minimize ``f`` over a box by iterative trisection of potentially optimal rectangles.

    Runs whole iterations until the evaluation count reaches ``max_evals``,
    so the final count may overshoot by one iteration's worth of samples.
    Non-finite objective values are treated as +inf.  Returns the incumbent
    point (original coordinates), its value, and a per-iteration history of
    ``(evaluations_used, best_value)``.
    """
    if max_evals < 1:
        raise ValueError("max_evals must be at least 1")
    lower = np.atleast_1d(np.asarray(box[0], dtype=float))
    upper = np.atleast_1d(np.asarray(box[1], dtype=float))
    if lower.shape != upper.shape or np.any(lower >= upper):
        raise ValueError("invalid box")
    d = lower.size
    span = upper - lower

    evals = 0

    def sample(u: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        val = float(f(lower + u * span))
        return val if np.isfinite(val) else math.inf

    center = np.full(d, 0.5)
    f_center = sample(center)
    best_u, best_f = center.copy(), f_center
    rects = [HyperRect(center, np.zeros(d, dtype=int), f_center, 0)]
    next_index = 1
    history: list[tuple[int, float]] = [(evals, best_f)]

    while evals < max_evals:
        selected = potentially_optimal(rects, best_f, epsilon)
        if not selected:
            break
        selected = sorted(selected, key=lambda r: r.index)
        selected_ids = {r.index for r in selected}
        survivors = [r for r in rects if r.index not in selected_ids]
        for rect in selected:
            lmin = int(np.min(rect.levels))
            split_dims = np.flatnonzero(rect.levels == lmin)
            delta = 3.0 ** (-(lmin + 1))
            values = {}
            w = np.empty(split_dims.size)
            for k, dim in enumerate(split_dims):
                for sign in (+1, -1):
                    pt = rect.center.copy()
                    pt[dim] += sign * delta
                    val = sample(pt)
                    values[(dim, sign)] = (pt, val)
                    if val < best_f:
                        best_f, best_u = val, pt.copy()
                w[k] = min(values[(dim, +1)][1], values[(dim, -1)][1])
            # best dimension first: it gets the largest child rectangles;
            # stable sort breaks w ties by increasing dimension index
            order = split_dims[np.argsort(w, kind="stable")]
            parent_levels = rect.levels.copy()
            for dim in order:
                parent_levels[dim] += 1
                for sign in (+1, -1):
                    pt, val = values[(dim, sign)]
                    survivors.append(HyperRect(pt, parent_levels.copy(), val, next_index))
                    next_index += 1
            survivors.append(HyperRect(rect.center, parent_levels, rect.f_center, next_index))
            next_index += 1
        rects = survivors
        history.append((evals, best_f))

    return lower + best_u * span, best_f, history


def penalized_objective(
    f: Callable[[np.ndarray], float],
    constraint_fns: Sequence[Callable[[np.ndarray], float]],
    rho: float,
) -> Callable[[np.ndarray], float]:
    """Quadratic penalty wrapper turning a constrained problem into a box-only one.

    Each constraint callback returns its signed excess (feasible at or below
    zero); the wrapped objective adds ``rho * sum(max(0, excess)^2)``.
    """
    if rho <= 0:
        raise ValueError("penalty weight rho must be positive")

    def penalized(x: np.ndarray) -> float:
        total = float(f(x))
        for g in constraint_fns:
            total += rho * max(0.0, float(g(x))) ** 2
        return total

    return penalized
