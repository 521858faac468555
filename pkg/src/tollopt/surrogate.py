"""Ordinary and regressing kriging with reinterpolation error and cross-validation.

The model works on inputs normalized to the unit cube and on responses
standardized to zero mean / unit variance; predictions are mapped back to the
original response units on output.  The Gaussian correlation kernel is

    psi(x, x') = exp(-sum_l theta_l (x_l - x'_l)^2)

and regularization adds a constant ``lambda`` to the correlation-matrix
diagonal, turning the interpolator into a regressor.  The reinterpolation
variance makes the prediction error vanish at every sampled point even when
``lambda > 0``, which keeps expected-improvement search from re-proposing
already-sampled points.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cho_solve

from .ga import GAParams, ga_maximize
from .toll import Bounds, TollVector

JITTER_START = 1e-10
JITTER_MAX = 1e-6

DEFAULT_THETA_BOUNDS = (1e-3, 1e2)
DEFAULT_LAMBDA_BOUNDS = (1e-6, 1.0)


class NumericalError(RuntimeError):
    """Matrix factorization failed even after the maximum diagonal jitter."""

    def __init__(self, message: str, jitter: float):
        super().__init__(f"{message} (last jitter attempted: {jitter:g})")
        self.jitter = jitter


def _cholesky_with_jitter(a: np.ndarray, strict: bool = False) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor, escalating diagonal jitter from 0 up to 1e-6.

    In strict mode a factorization that only succeeds because the jitter
    itself props up a rank-deficient matrix (smallest pivot on the order of
    the jitter) still counts as a failure; jitter is allowed to cure roundoff
    indefiniteness, not singularity.  Used on the likelihood path so the
    hyperparameter search steers clear of degenerate correlation structures.
    """
    n = a.shape[0]
    jitter = 0.0
    while True:
        try:
            chol = np.linalg.cholesky(a + jitter * np.eye(n))
            if strict and jitter > 0.0 and float(np.min(np.diag(chol))) ** 2 <= 100.0 * jitter:
                raise np.linalg.LinAlgError("pivot dominated by jitter")
            return chol, jitter
        except np.linalg.LinAlgError:
            jitter = JITTER_START if jitter == 0.0 else jitter * 10.0
            if jitter > JITTER_MAX * (1.0 + 1e-12):
                raise NumericalError("correlation matrix not positive definite", JITTER_MAX)


def correlation(x1, x2, theta) -> float:
    """Gaussian correlation between two points; 1 at zero distance."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if x1.shape != x2.shape or x1.shape != theta.shape:
        raise ValueError("points and theta must share one dimension")
    if np.any(theta < 0):
        raise ValueError("theta must be nonnegative")
    return float(np.exp(-np.sum(theta * (x1 - x2) ** 2)))


def corr_matrix(design: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Correlation matrix of a design (unit diagonal, no regularization)."""
    diff = design[:, None, :] - design[None, :, :]
    return np.exp(-np.einsum("ijl,l->ij", diff * diff, theta))


def corr_vector(design: np.ndarray, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Correlations between query points ``x`` (k, d) and the design rows: (k, n)."""
    diff = x[:, None, :] - design[None, :, :]
    return np.exp(-np.einsum("kjl,l->kj", diff * diff, theta))


def log_likelihood(design: np.ndarray, y: np.ndarray, theta, lam: float) -> float:
    """Concentrated Gaussian-process log-likelihood with mean and variance profiled out.

    Equals the multivariate-normal log-density of ``y`` with mean ``mu_hat``
    and covariance ``sigma2_hat * (Psi + lambda I)`` where both estimates are
    the closed-form maximizers; no constant terms are dropped.
    """
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = design.shape[0]
    if n < 2:
        raise ValueError("need at least 2 sample points")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    r = corr_matrix(design, theta)
    r[np.diag_indices_from(r)] = 1.0 + lam
    chol, _ = _cholesky_with_jitter(r, strict=True)
    ones = np.ones(n)
    rinv_y = cho_solve((chol, True), y)
    rinv_1 = cho_solve((chol, True), ones)
    mu = float(ones @ rinv_y) / float(ones @ rinv_1)
    resid = y - mu
    sigma2 = float(resid @ cho_solve((chol, True), resid)) / n
    sigma2 = max(sigma2, 1e-300)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * (n * math.log(2.0 * math.pi) + n * math.log(sigma2) + n + log_det)


@dataclass
class RKModel:
    """Fitted regressing-kriging state.

    ``design`` rows live in the unit cube; ``y`` is in original response
    units.  ``mu_hat``, ``sigma2_hat`` and ``sigma2_ri`` are reported in
    original units as well.  Factorized matrices are kept for fast solves.
    """

    design: np.ndarray          # (n, d)
    y: np.ndarray               # (n,) original units
    theta: np.ndarray           # (d,)
    lam: float
    mu_hat: float
    sigma2_hat: float
    sigma2_ri: float
    y_shift: float
    y_scale: float
    # internal, standardized-space quantities
    _chol_r: np.ndarray = field(repr=False)
    _chol_psi: np.ndarray = field(repr=False)
    _weights: np.ndarray = field(repr=False)    # R^-1 (y_std - mu_std)
    _mu_std: float = field(repr=False)
    _sigma2_std: float = field(repr=False)
    _sigma2_ri_std: float = field(repr=False)

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def d(self) -> int:
        return self.design.shape[1]


@dataclass
class Prediction:
    """Predictive mean and error at one or more query points."""

    mean: np.ndarray | float
    variance: np.ndarray | float
    ri_variance: np.ndarray | float
    extrapolated: bool = False


@dataclass
class CVRecord:
    """One leave-one-out fold: held-out observation vs refit-free prediction."""

    index: int
    observed: float
    predicted: float
    std_error: float
    standardized_residual: float
    degenerate: bool = False


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    shift = float(np.mean(y))
    scale = float(np.std(y))
    if scale < 1e-12:
        scale = 1.0
    return (y - shift) / scale, shift, scale


def _assemble(design: np.ndarray, y: np.ndarray, theta: np.ndarray, lam: float) -> RKModel:
    n = design.shape[0]
    y_std, shift, scale = _standardize(y)
    psi = corr_matrix(design, theta)
    r = psi.copy()
    r[np.diag_indices_from(r)] = 1.0 + lam
    chol_r, _ = _cholesky_with_jitter(r)
    chol_psi, _ = _cholesky_with_jitter(psi)
    ones = np.ones(n)
    rinv_y = cho_solve((chol_r, True), y_std)
    rinv_1 = cho_solve((chol_r, True), ones)
    mu_std = float(ones @ rinv_y) / float(ones @ rinv_1)
    resid = y_std - mu_std
    weights = cho_solve((chol_r, True), resid)
    sigma2_std = max(float(resid @ weights) / n, 0.0)
    sigma2_ri_std = max(float(weights @ psi @ weights) / n, 0.0)
    return RKModel(
        design=design,
        y=y.copy(),
        theta=np.asarray(theta, dtype=float).copy(),
        lam=float(lam),
        mu_hat=shift + scale * mu_std,
        sigma2_hat=scale ** 2 * sigma2_std,
        sigma2_ri=scale ** 2 * sigma2_ri_std,
        y_shift=shift,
        y_scale=scale,
        _chol_r=chol_r,
        _chol_psi=chol_psi,
        _weights=weights,
        _mu_std=mu_std,
        _sigma2_std=sigma2_std,
        _sigma2_ri_std=sigma2_ri_std,
    )


def fit(
    samples: Sequence[tuple],
    bounds: Bounds,
    theta_bounds: tuple[float, float] = DEFAULT_THETA_BOUNDS,
    lambda_bounds: tuple[float, float] = DEFAULT_LAMBDA_BOUNDS,
    ga_params: Optional[GAParams] = None,
    rng: Optional[np.random.Generator] = None,
) -> RKModel:
    """Fit a regressing-kriging model by GA maximization of the log-likelihood.

    ``samples`` is a sequence of ``(toll_or_vector, response)`` pairs; inputs
    are normalized to the unit cube with ``bounds`` before fitting.  ``theta``
    and ``lambda`` are searched in log10 space inside their boxes; passing
    equal lambda bounds pins ``lambda`` (``(0, 0)`` gives an interpolating
    ordinary-kriging fit).
    """
    if len(samples) < 2:
        raise ValueError("need at least 2 sample points")
    rows = []
    ys = []
    for x, val in samples:
        arr = x.as_array() if isinstance(x, TollVector) else np.asarray(x, dtype=float)
        rows.append(bounds.to_unit(arr))
        ys.append(float(val))
    design = np.asarray(rows)
    y = np.asarray(ys)
    if np.unique(design, axis=0).shape[0] < 2:
        raise ValueError("need at least 2 distinct sample points")
    d = design.shape[1]
    y_std, _, _ = _standardize(y)

    lam_fixed = lambda_bounds[0] == lambda_bounds[1]
    log_theta_lo, log_theta_hi = np.log10(theta_bounds[0]), np.log10(theta_bounds[1])
    genes = d if lam_fixed else d + 1
    lower = np.full(genes, log_theta_lo)
    upper = np.full(genes, log_theta_hi)
    if not lam_fixed:
        lower[d] = np.log10(lambda_bounds[0])
        upper[d] = np.log10(lambda_bounds[1])

    def objective(z: np.ndarray) -> float:
        theta = 10.0 ** z[:d]
        lam = lambda_bounds[0] if lam_fixed else 10.0 ** z[d]
        try:
            return log_likelihood(design, y_std, theta, lam)
        except NumericalError:
            return -np.inf

    rng = rng or np.random.default_rng()
    with warnings.catch_warnings():
        # singular Psi at extreme theta is expected during the search
        warnings.simplefilter("ignore")
        best_z, _ = ga_maximize(objective, (lower, upper), params=ga_params, rng=rng)
    theta = 10.0 ** best_z[:d]
    lam = lambda_bounds[0] if lam_fixed else 10.0 ** best_z[d]
    return _assemble(design, y, theta, float(lam))


def fit_fixed(samples: Sequence[tuple], bounds: Bounds, theta, lam: float) -> RKModel:
    """Assemble a model at given hyperparameters (no search)."""
    rows = []
    ys = []
    for x, val in samples:
        arr = x.as_array() if isinstance(x, TollVector) else np.asarray(x, dtype=float)
        rows.append(bounds.to_unit(arr))
        ys.append(float(val))
    return _assemble(np.asarray(rows), np.asarray(ys), np.asarray(theta, dtype=float), float(lam))


def _predict_arrays(model: RKModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    psi = corr_vector(model.design, model.theta, x)           # (k, n)
    mean_std = model._mu_std + psi @ model._weights
    a = cho_solve((model._chol_r, True), psi.T)               # (n, k)
    var_std = model._sigma2_std * (1.0 + model.lam - np.einsum("kn,nk->k", psi, a))
    b = cho_solve((model._chol_psi, True), psi.T)
    ri_std = model._sigma2_ri_std * (1.0 - np.einsum("kn,nk->k", psi, b))
    scale2 = model.y_scale ** 2
    mean = model.y_shift + model.y_scale * mean_std
    variance = np.maximum(var_std, 0.0) * scale2
    ri_variance = np.maximum(ri_std, 0.0) * scale2
    return mean, variance, ri_variance


def predict(model: RKModel, x) -> Prediction:
    """Predictive mean, variance, and reinterpolation variance at ``x``.

    ``x`` lives in the unit cube; a single point gives scalar fields, a
    ``(k, d)`` batch gives arrays.  Querying outside the cube is allowed but
    flagged as extrapolation.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if pts.shape[1] != model.d:
        raise ValueError(f"query dimension {pts.shape[1]} != model dimension {model.d}")
    extrapolated = bool(np.any(pts < -1e-12) or np.any(pts > 1.0 + 1e-12))
    mean, var, ri = _predict_arrays(model, pts)
    if single:
        return Prediction(float(mean[0]), float(var[0]), float(ri[0]), extrapolated)
    return Prediction(mean, var, ri, extrapolated)


def loo_cv(model: RKModel) -> list[CVRecord]:
    """Leave-one-out cross-validation holding ``theta`` and ``lambda`` fixed.

    Each fold refits only the profiled mean and variance on the remaining
    points and predicts the held-out observation with its standard error.
    Folds with singular reduced matrices or vanishing error are flagged
    degenerate rather than raising.
    """
    n = model.n
    if n < 3:
        raise ValueError("need at least 3 sample points for cross-validation")
    psi_full = corr_matrix(model.design, model.theta)
    y_std = (model.y - model.y_shift) / model.y_scale
    records = []
    for i in range(n):
        keep = np.arange(n) != i
        psi_red = psi_full[np.ix_(keep, keep)]
        r_red = psi_red.copy()
        r_red[np.diag_indices_from(r_red)] = 1.0 + model.lam
        try:
            chol, _ = _cholesky_with_jitter(r_red)
        except NumericalError:
            records.append(CVRecord(i, float(model.y[i]), math.nan, math.nan, math.nan, True))
            continue
        y_red = y_std[keep]
        ones = np.ones(n - 1)
        rinv_y = cho_solve((chol, True), y_red)
        rinv_1 = cho_solve((chol, True), ones)
        mu = float(ones @ rinv_y) / float(ones @ rinv_1)
        resid = y_red - mu
        w = cho_solve((chol, True), resid)
        sigma2 = max(float(resid @ w) / (n - 1), 0.0)
        psi_i = psi_full[keep, i]
        mean_std = mu + psi_i @ w
        var_std = sigma2 * (1.0 + model.lam - float(psi_i @ cho_solve((chol, True), psi_i)))
        predicted = model.y_shift + model.y_scale * mean_std
        std_err = model.y_scale * math.sqrt(max(var_std, 0.0))
        observed = float(model.y[i])
        if std_err <= 1e-300:
            records.append(CVRecord(i, observed, predicted, std_err, math.nan, True))
        else:
            records.append(CVRecord(i, observed, predicted, std_err,
                                    (observed - predicted) / std_err, False))
    return records


def model_to_json(model: RKModel) -> str:
    """Serialize for reproducible resume; floats round-trip exactly via 17-digit strings."""

    def enc(x) -> list | str:
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return format(float(arr), ".17g")
        return [enc(v) for v in arr]

    doc = {
        "design": enc(model.design),
        "y": enc(model.y),
        "theta": enc(model.theta),
        "lambda": enc(model.lam),
        "mu_hat": enc(model.mu_hat),
        "sigma2_hat": enc(model.sigma2_hat),
        "sigma2_ri": enc(model.sigma2_ri),
        "y_shift": enc(model.y_shift),
        "y_scale": enc(model.y_scale),
    }
    return json.dumps(doc, indent=2)


def model_from_json(text: str) -> RKModel:
    doc = json.loads(text)

    def dec(v):
        if isinstance(v, list):
            return np.asarray([dec(u) for u in v], dtype=float)
        return float(v)

    design = np.atleast_2d(dec(doc["design"]))
    y = np.atleast_1d(dec(doc["y"]))
    model = _assemble(design, y, np.atleast_1d(dec(doc["theta"])), float(dec(doc["lambda"])))
    return model
