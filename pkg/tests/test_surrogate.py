import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import multivariate_normal

from tollopt.doe import lhs
from tollopt.ga import GAParams
from tollopt.surrogate import (NumericalError, correlation, corr_matrix, fit,
                               fit_fixed, log_likelihood, loo_cv,
                               model_from_json, model_to_json, predict)
from tollopt.toll import Bounds

UNIT2 = Bounds(np.zeros(2), np.ones(2))
SMALL_GA = GAParams(population_size=24, generations=16)


def branin_like(x):
    """Smooth 2-D test response on the unit square."""
    return np.sin(3.0 * x[..., 0]) + 0.5 * (x[..., 1] - 0.3) ** 2 + 0.25 * x[..., 0] * x[..., 1]


def make_samples(n, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    pts = lhs(n, 2, rng)
    ys = branin_like(pts)
    if noise:
        ys = ys + rng.normal(0.0, noise, size=n)
    return [(pts[i], float(ys[i])) for i in range(n)], pts, ys


class TestCorrelation:
    def test_identical_points_correlate_fully(self):
        x = np.array([0.2, 0.9, 0.4])
        assert correlation(x, x, np.array([1.0, 2.0, 3.0])) == 1.0

    def test_zero_theta_degenerates_to_one(self):
        assert correlation(np.zeros(3), np.ones(3), np.zeros(3)) == 1.0

    def test_unit_distance_unit_theta(self):
        val = correlation(np.array([0.0]), np.array([1.0]), np.array([1.0]))
        assert val == pytest.approx(math.exp(-1.0), abs=1e-12)
        assert val == pytest.approx(0.367879, abs=1e-6)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            correlation(np.zeros(2), np.zeros(3), np.zeros(3))
        with pytest.raises(ValueError):
            correlation(np.zeros(2), np.zeros(2), -np.ones(2))

    @given(d0=st.floats(0.05, 2.0), bump=st.floats(0.01, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_strictly_decreasing_in_coordinate_distance(self, d0, bump):
        theta = np.array([0.7, 1.3])
        near = correlation(np.zeros(2), np.array([d0, 0.1]), theta)
        far = correlation(np.zeros(2), np.array([d0 + bump, 0.1]), theta)
        assert far < near


class TestLogLikelihood:
    def test_duplicate_rows_without_regularization_fail(self):
        design = np.array([[0.3, 0.3], [0.3, 0.3]])
        y = np.array([1.0, 1.0])
        with pytest.raises(NumericalError) as err:
            log_likelihood(design, y, np.array([1.0, 1.0]), 0.0)
        assert err.value.jitter == pytest.approx(1e-6)

    def test_duplicate_rows_with_regularization_are_fine(self):
        design = np.array([[0.3, 0.3], [0.3, 0.3]])
        y = np.array([1.0, 1.0])
        val = log_likelihood(design, y, np.array([1.0, 1.0]), 0.1)
        assert np.isfinite(val)

    def test_matches_dense_normal_log_density(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            n = int(rng.integers(3, 21))
            design = rng.uniform(size=(n, 3))
            y = rng.normal(size=n)
            theta = 10.0 ** rng.uniform(-2, 1.5, size=3)
            lam = 10.0 ** rng.uniform(-6, 0)
            ours = log_likelihood(design, y, theta, lam)
            r = corr_matrix(design, theta) + lam * np.eye(n)
            rinv = np.linalg.inv(r)
            ones = np.ones(n)
            mu = (ones @ rinv @ y) / (ones @ rinv @ ones)
            sigma2 = (y - mu) @ rinv @ (y - mu) / n
            oracle = multivariate_normal.logpdf(y, mean=mu * ones, cov=sigma2 * r)
            assert ours == pytest.approx(oracle, rel=1e-8)


class TestFit:
    def test_noise_free_data_prefers_minimal_regularization(self):
        samples, pts, ys = make_samples(20, seed=1)
        model = fit(samples, UNIT2, ga_params=SMALL_GA, rng=np.random.default_rng(3))
        y_std = (ys - ys.mean()) / ys.std()
        at_floor = log_likelihood(pts, y_std, model.theta, 1e-6)
        at_half = log_likelihood(pts, y_std, model.theta, 0.5)
        assert at_floor > at_half
        assert model.lam < 1e-2

    def test_noisy_data_pushes_lambda_off_the_floor(self):
        samples, _, _ = make_samples(25, seed=2, noise=0.5)
        model = fit(samples, UNIT2, ga_params=SMALL_GA, rng=np.random.default_rng(4))
        assert model.lam > 1e-6

    def test_two_identical_responses(self):
        samples = [(np.array([0.2, 0.2]), 1.5), (np.array([0.8, 0.8]), 1.5)]
        model = fit_fixed(samples, UNIT2, theta=np.array([1.0, 1.0]), lam=0.0)
        assert model.sigma2_hat >= 0.0
        pred = predict(model, np.array([0.5, 0.5]))
        assert pred.mean == pytest.approx(1.5, abs=1e-9)

    def test_fewer_than_two_distinct_points_rejected(self):
        with pytest.raises(ValueError):
            fit([(np.array([0.1, 0.1]), 1.0)], UNIT2)
        dup = [(np.array([0.1, 0.1]), 1.0), (np.array([0.1, 0.1]), 2.0)]
        with pytest.raises(ValueError):
            fit(dup, UNIT2)


class TestPredict:
    def test_interpolation_identity_without_regularization(self):
        samples, pts, ys = make_samples(15, seed=5)
        model = fit_fixed(samples, UNIT2, theta=np.array([3.0, 3.0]), lam=0.0)
        for i in range(15):
            pred = predict(model, pts[i])
            assert abs(pred.mean - ys[i]) <= 1e-6 * (1.0 + abs(ys[i]))
            assert pred.variance <= 1e-8 * model.sigma2_hat

    def test_regularized_variance_positive_but_ri_variance_zero_at_samples(self):
        samples, pts, _ = make_samples(15, seed=6)
        model = fit_fixed(samples, UNIT2, theta=np.array([3.0, 3.0]), lam=0.3)
        for i in range(15):
            pred = predict(model, pts[i])
            assert pred.variance > 0.0
            assert pred.ri_variance <= 1e-10 * max(model.sigma2_ri, 1e-300)

    def test_single_training_point_predicts_its_value_everywhere(self):
        model = fit_fixed([(np.array([0.4, 0.6]), 2.25)], UNIT2,
                          theta=np.array([1.0, 1.0]), lam=0.0)
        for q in (np.zeros(2), np.ones(2), np.array([0.9, 0.1])):
            assert predict(model, q).mean == pytest.approx(2.25, abs=1e-12)

    def test_prediction_invariant_under_sample_permutation(self):
        samples, _, _ = make_samples(12, seed=7)
        model_a = fit_fixed(samples, UNIT2, theta=np.array([2.0, 1.0]), lam=0.05)
        perm = np.random.default_rng(0).permutation(12)
        model_b = fit_fixed([samples[i] for i in perm], UNIT2,
                            theta=np.array([2.0, 1.0]), lam=0.05)
        q = np.array([0.33, 0.77])
        pa, pb = predict(model_a, q), predict(model_b, q)
        assert pa.mean == pytest.approx(pb.mean, rel=1e-10)
        assert pa.variance == pytest.approx(pb.variance, rel=1e-8, abs=1e-12)

    def test_ri_variance_never_exceeds_variance(self):
        samples, _, _ = make_samples(15, seed=8)
        model = fit_fixed(samples, UNIT2, theta=np.array([4.0, 2.0]), lam=0.2)
        grid = lhs(60, 2, np.random.default_rng(9))
        pred = predict(model, grid)
        assert np.all(pred.ri_variance <= pred.variance + 1e-12)

    def test_extrapolation_flag(self):
        samples, _, _ = make_samples(5, seed=10)
        model = fit_fixed(samples, UNIT2, theta=np.array([1.0, 1.0]), lam=0.0)
        assert not predict(model, np.array([0.5, 0.5])).extrapolated
        assert predict(model, np.array([1.4, 0.5])).extrapolated


class TestCrossValidation:
    def test_smooth_surface_residuals_mostly_inside_three_sigma(self):
        samples, _, _ = make_samples(30, seed=11)
        model = fit(samples, UNIT2, ga_params=SMALL_GA, rng=np.random.default_rng(12))
        records = loo_cv(model)
        usable = [r for r in records if not r.degenerate]
        inside = [r for r in usable if abs(r.standardized_residual) <= 3.0]
        assert len(inside) / len(usable) >= 0.95
        # the same folds must satisfy the +/- 3 standard error interval
        for r in inside:
            assert abs(r.observed - r.predicted) <= 3.0 * r.std_error

    def test_constant_responses_flag_degenerate_or_zero(self):
        samples = [(np.array([x, y]), 7.0)
                   for x, y in [(0.1, 0.1), (0.5, 0.5), (0.9, 0.2), (0.3, 0.8)]]
        model = fit_fixed(samples, UNIT2, theta=np.array([1.0, 1.0]), lam=0.0)
        for rec in loo_cv(model):
            assert rec.degenerate or rec.standardized_residual == pytest.approx(0.0, abs=1e-6)

    def test_requires_three_points(self):
        samples, _, _ = make_samples(2, seed=13)
        model = fit_fixed(samples, UNIT2, theta=np.array([1.0, 1.0]), lam=0.1)
        with pytest.raises(ValueError):
            loo_cv(model)


def test_regularized_matrix_diagonal_is_one_plus_lambda():
    samples, pts, _ = make_samples(10, seed=20)
    lam = 0.37
    model = fit_fixed(samples, UNIT2, theta=np.array([1.5, 0.8]), lam=lam)
    reconstructed = model._chol_r @ model._chol_r.T
    assert np.allclose(np.diag(reconstructed), 1.0 + lam, atol=1e-12)
    psi = corr_matrix(pts, np.array([1.5, 0.8]))
    assert np.all(np.diag(psi) == 1.0)


class TestSerialization:
    def test_round_trip_is_exact(self):
        samples, _, _ = make_samples(10, seed=14)
        model = fit_fixed(samples, UNIT2, theta=np.array([2.5, 0.4]), lam=0.01)
        text = model_to_json(model)
        clone = model_from_json(text)
        assert np.array_equal(model.design, clone.design)
        assert np.array_equal(model.y, clone.y)
        assert model.lam == clone.lam
        q = lhs(20, 2, np.random.default_rng(15))
        pa, pb = predict(model, q), predict(clone, q)
        assert np.array_equal(pa.mean, pb.mean)
        assert np.array_equal(pa.variance, pb.variance)
        assert np.array_equal(pa.ri_variance, pb.ri_variance)

    def test_document_fields_are_decimal_strings(self):
        samples, _, _ = make_samples(4, seed=16)
        model = fit_fixed(samples, UNIT2, theta=np.array([1.0, 1.0]), lam=0.0)
        doc = json.loads(model_to_json(model))
        assert isinstance(doc["lambda"], str)
        assert isinstance(doc["design"][0][0], str)
        assert float(doc["sigma2_hat"]) == model.sigma2_hat
