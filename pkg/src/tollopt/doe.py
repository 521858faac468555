"""Space-filling design of experiments: Latin hypercube sampling with maximin selection."""

from __future__ import annotations

import csv
import warnings

import numpy as np
from scipy.spatial.distance import pdist

from .toll import Bounds, TollVector


def lhs(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one Latin hypercube plan of ``n`` points in ``[0, 1]^d``.

    Every dimension is stratified into ``n`` equal intervals; each interval
    receives exactly one point, uniformly placed within it, and the pairing of
    strata across dimensions is an independent uniform permutation per
    dimension.

    Returns an ``(n, d)`` array.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    plan = np.empty((n, d))
    for j in range(d):
        strata = rng.permutation(n)
        offsets = rng.uniform(size=n)
        plan[:, j] = (strata + offsets) / n
    return plan


def maximin_lhs(n: int, d: int, n_candidates: int, rng: np.random.Generator) -> np.ndarray:
    """Best of ``n_candidates`` Latin hypercube plans by the maximin criterion.

    Generates candidates with :func:`lhs` (consuming the generator in that
    order, which tests rely on) and keeps the plan whose minimum pairwise
    Euclidean distance is largest; ties go to the first candidate seen.
    """
    if n_candidates < 1:
        raise ValueError(f"need n_candidates >= 1, got {n_candidates}")
    best_plan = None
    best_dist = -np.inf
    for _ in range(n_candidates):
        plan = lhs(n, d, rng)
        min_dist = float(np.min(pdist(plan))) if n > 1 else np.inf
        if min_dist > best_dist:
            best_dist = min_dist
            best_plan = plan
    return best_plan


def build_initial_plan(m: int, bounds: Bounds, rng: np.random.Generator,
                       n_candidates: int = 100) -> list[TollVector]:
    """Initial sample plan for a toll problem with ``m`` tolling intervals.

    ``2(2m + 1)`` maximin-LHS points are scaled from the unit cube into the
    toll box, then three fixed augmentation points are appended: the lower
    corner, the upper corner, and the box midpoint.  Total ``2(2m + 1) + 3``.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got m={m}")
    d = 2 * m
    if bounds.d != d:
        raise ValueError(f"bounds have dimension {bounds.d}, expected {d}")
    if np.all(bounds.span == 0.0):
        warnings.warn("degenerate bounds: all plan points collapse to a single toll vector")
    n = 2 * (2 * m + 1)
    unit = maximin_lhs(n, d, n_candidates, rng)
    points = [TollVector.from_array(bounds.scale_from_unit(row)) for row in unit]
    points.append(TollVector.from_array(bounds.lower.copy()))
    points.append(TollVector.from_array(bounds.upper.copy()))
    points.append(TollVector.from_array(bounds.midpoint()))
    return points


def save_plan_csv(points: list[TollVector], path) -> None:
    """Write one design point per row with header ``v_1..v_m,w_1..w_m``."""
    if not points:
        raise ValueError("empty plan")
    m = points[0].m
    header = [f"v_{h + 1}" for h in range(m)] + [f"w_{h + 1}" for h in range(m)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for p in points:
            writer.writerow([repr(float(x)) for x in p.as_array()])


def load_plan_csv(path) -> list[TollVector]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        return [TollVector.from_array([float(x) for x in row]) for row in reader]
