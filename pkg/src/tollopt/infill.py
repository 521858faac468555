"""Expected-improvement acquisition and the infill proposal search.

All acquisition evaluations use the reinterpolation variance, never the raw
regression variance, so the search cannot stall on already-sampled points.
The constrained variant multiplies expected improvement by the Gaussian
probability that the constraint surrogate stays below its limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .ga import GAParams, ga_maximize
from .surrogate import RKModel, predict
from .toll import Bounds, TollVector

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# acquisition values at or below this count as the flat all-zero plateau
ACQUISITION_TIE_EPS = 1e-16


def expected_improvement(mean, variance, y_min):
    """Closed-form E[max(y_min - Y, 0)] for Y ~ N(mean, variance).

    Zero variance gives exactly zero improvement.  Accepts scalars or arrays.
    """
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError("variance must be nonnegative")
    s = np.sqrt(variance)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(s > 0, (y_min - mean) / np.where(s > 0, s, 1.0), 0.0)
    pdf = np.exp(-0.5 * u * u) / _SQRT_2PI
    ei = (y_min - mean) * ndtr(u) + s * pdf
    ei = np.where(s > 0, np.maximum(ei, 0.0), 0.0)
    return float(ei) if ei.ndim == 0 else ei


def prob_feasible(mean, variance, delta_max):
    """Gaussian probability that the constraint stays at or below ``delta_max``."""
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError("variance must be nonnegative")
    s = np.sqrt(variance)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(s > 0, (delta_max - mean) / np.where(s > 0, s, 1.0), 0.0)
    p = np.where(s > 0, ndtr(z), (mean <= delta_max).astype(float))
    return float(p) if p.ndim == 0 else p


def constrained_ei(ei, p_feasible):
    """Product acquisition: improvement only counts where feasibility is likely."""
    out = np.asarray(ei, dtype=float) * np.asarray(p_feasible, dtype=float)
    return float(out) if out.ndim == 0 else out


@dataclass
class AcquisitionContext:
    """Everything the infill search needs: surrogates, incumbent, and feasible set."""

    obj_model: RKModel
    bounds: Bounds
    y_min: float
    smoothing: tuple[float, float]          # (alpha, beta) adjacent-interval limits
    con_model: Optional[RKModel] = None
    delta_max: Optional[float] = None

    def __post_init__(self):
        if (self.con_model is None) != (self.delta_max is None):
            raise ValueError("con_model and delta_max must be given together")


def repair_smoothing(x: np.ndarray, alpha: float, beta: float, bounds: Bounds) -> np.ndarray:
    """Clip a flat toll vector onto the smoothing-feasible part of the box.

    Scans each rate chain left to right and clips every rate into the band
    reachable from its predecessor intersected with the box.  With identical
    per-interval bounds the intersection is never empty, so the result always
    satisfies both the box and the adjacent-interval limits.
    """
    x = np.asarray(x, dtype=float)
    m = bounds.m
    out = x.copy()
    for start, limit in ((0, alpha), (m, beta)):
        lo = bounds.lower[start:start + m]
        hi = bounds.upper[start:start + m]
        seg = out[start:start + m]
        seg[0] = min(max(seg[0], lo[0]), hi[0])
        for h in range(1, m):
            delta = min(max(seg[h] - seg[h - 1], -limit), limit)
            seg[h] = min(max(seg[h - 1] + delta, lo[h]), hi[h])
    return out


def acquisition_value(ctx: AcquisitionContext, x_unit: np.ndarray):
    """Reinterpolation EI (times feasibility probability when constrained) at unit-cube points."""
    pred = predict(ctx.obj_model, x_unit)
    ei = expected_improvement(pred.mean, pred.ri_variance, ctx.y_min)
    if ctx.con_model is None:
        return ei
    cpred = predict(ctx.con_model, x_unit)
    p = prob_feasible(cpred.mean, cpred.ri_variance, ctx.delta_max)
    return constrained_ei(ei, p)


def propose_infill(
    ctx: AcquisitionContext,
    ga_params: Optional[GAParams] = None,
    rng: Optional[np.random.Generator] = None,
) -> tuple[TollVector, float]:
    """GA-maximize the acquisition over the smoothing-feasible toll box.

    Infeasible candidates are repaired by sequential clipping before
    evaluation, so the returned toll satisfies the box and smoothing limits
    exactly.  If the acquisition surface has collapsed to a flat zero plateau,
    the tie is broken by maximizing the distance to the nearest existing
    sample, which keeps late iterations space-filling.
    """
    rng = rng or np.random.default_rng()
    bounds = ctx.bounds
    alpha, beta = ctx.smoothing
    d = bounds.d
    unit_box = (np.zeros(d), np.ones(d))

    def repair(u: np.ndarray) -> np.ndarray:
        tolls = bounds.scale_from_unit(np.clip(u, 0.0, 1.0))
        return bounds.to_unit(repair_smoothing(tolls, alpha, beta, bounds))

    def acq(u: np.ndarray) -> float:
        return float(acquisition_value(ctx, u))

    best_u, best_val = ga_maximize(acq, unit_box, params=ga_params, rng=rng, repair=repair)

    if best_val <= ACQUISITION_TIE_EPS:
        design = ctx.obj_model.design

        def spread(u: np.ndarray) -> float:
            return float(np.min(np.linalg.norm(design - u, axis=1)))

        best_u, _ = ga_maximize(spread, unit_box, params=ga_params, rng=rng, repair=repair)
        best_val = acq(best_u)

    tolls = repair_smoothing(bounds.scale_from_unit(best_u), alpha, beta, bounds)
    return TollVector.from_array(tolls), float(best_val)
