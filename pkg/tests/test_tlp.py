from types import SimpleNamespace

import numpy as np
import pytest

from conftest import make_desk_spec
from tollopt.ga import GAParams
from tollopt.simnet import desk_preset
from tollopt.tlp import (OptimizationRun, SampleRecord, check_smoothing, constraint_value,
                         convergence_history, evaluate_toll, load_samples_csv,
                         objective_value, optimize, replication_seeds, write_run_dir)
from tollopt.toll import Bounds, TollVector

FAST_GA = GAParams(population_size=20, generations=12)


def fake_result(kbar, dbar=None):
    kbar = np.asarray(kbar, dtype=float)
    dbar = np.zeros_like(kbar) if dbar is None else np.asarray(dbar, dtype=float)
    return SimpleNamespace(m=kbar.size, interval_density=kbar, interval_deviation=dbar)


class TestObjectiveAndConstraint:
    def test_exact_tracking_scores_zero(self):
        results = [fake_result([25.0, 25.0, 25.0])] * 3
        assert objective_value(results, 25.0) == 0.0

    def test_hand_computed_average_gap(self):
        assert objective_value([fake_result([20.0, 30.0])], 25.0) == pytest.approx(5.0)

    def test_replication_mean(self):
        results = [fake_result([29.0, 29.0]), fake_result([31.0, 31.0])]
        assert objective_value(results, 25.0) == pytest.approx(5.0)

    def test_constraint_zero_and_hand_average(self):
        assert constraint_value([fake_result([1, 2], [0, 0])]) == 0.0
        assert constraint_value([fake_result([0] * 4, [2.0, 4.0, 6.0, 8.0])]) == pytest.approx(5.0)

    def test_empty_and_mismatched_inputs_rejected(self):
        with pytest.raises(ValueError):
            objective_value([], 25.0)
        with pytest.raises(ValueError):
            constraint_value([])
        with pytest.raises(ValueError):
            objective_value([fake_result([1, 2]), fake_result([1, 2, 3])], 25.0)


class TestSmoothing:
    def test_constant_pattern_is_feasible(self):
        toll = TollVector.constant(4, 0.7, 9.0)
        assert check_smoothing(toll, 1.0 / 3.0, 5.0)

    def test_jump_detected_with_location(self):
        toll = TollVector(np.array([0.0, 0.5, 0.5]), np.zeros(3))
        verdict = check_smoothing(toll, 0.33, 5.0)
        assert not verdict
        assert verdict.violations == [("distance", 0, pytest.approx(0.5 - 0.33))]

    def test_delay_chain_checked_against_beta(self):
        toll = TollVector(np.zeros(3), np.array([0.0, 6.0, 6.0]))
        verdict = check_smoothing(toll, 0.33, 5.0)
        assert [v[0] for v in verdict.violations] == ["delay"]


class TestConvergenceHistory:
    def run_with(self, values):
        spec = make_desk_spec()
        return OptimizationRun(spec=spec, method="rk", master_seed=0, rep_seeds=[0],
                               samples=[], acquisition_history=list(values),
                               best_index=0, evaluations=0)

    def test_window_of_four_averages(self):
        _, avg = convergence_history(self.run_with([4.0, 0.0, 2.0, 2.0]))
        assert np.array_equal(avg, [2.0])

    def test_partial_window_policy(self):
        raw, avg = convergence_history(self.run_with([3.0, 5.0]))
        assert np.array_equal(avg, [4.0])
        raw, avg = convergence_history(self.run_with([4.0, 0.0, 2.0, 2.0, 6.0]))
        assert np.array_equal(avg, [2.0, 6.0])

    def test_decreasing_series_stays_decreasing(self):
        values = list(np.linspace(3.0, 0.0, 12))
        _, avg = convergence_history(self.run_with(values))
        assert all(b <= a for a, b in zip(avg, avg[1:]))

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            convergence_history(self.run_with([]))


class TestEvaluation:
    def test_common_random_numbers_are_reproducible(self):
        spec = make_desk_spec(replications=2)
        seeds = replication_seeds(7, 2)
        toll = TollVector.constant(spec.m, 0.3, 4.0)
        a = evaluate_toll(spec, toll, seeds)
        b = evaluate_toll(spec, toll, seeds)
        assert np.array_equal(a.objective_reps, b.objective_reps)
        assert a.objective == b.objective

    def test_replication_seed_layout(self):
        assert replication_seeds(3, 3) == [3000, 3001, 3002]


class TestSpecValidation:
    def test_budget_must_exceed_plan(self):
        with pytest.raises(ValueError, match="21"):
            make_desk_spec(budget=21)

    def test_paper_scale_counts(self):
        config = desk_preset()
        spec = make_desk_spec()
        assert spec.initial_plan_size == 21
        # m = 8 scenario: 37 initial points, budget 100 leaves 63 infill
        import dataclasses
        cfg8 = dataclasses.replace(config, interval_minutes=15.0)
        spec8 = make_desk_spec(config=cfg8, bounds=Bounds.uniform(8, 1.0, 15.0), budget=100)
        assert spec8.initial_plan_size == 37
        assert spec8.budget - spec8.initial_plan_size == 63

    def test_bad_smoothing_limits_rejected(self):
        with pytest.raises(ValueError):
            make_desk_spec(alpha=0.0)
        with pytest.raises(ValueError):
            make_desk_spec(replications=0)


@pytest.fixture(scope="module")
def small_run():
    spec = make_desk_spec(budget=25, replications=1,
                          fit_ga=FAST_GA, infill_ga=FAST_GA)
    return optimize(spec, method="rk", seed=2)


class TestOptimizeSmallBudget:
    def test_budget_and_history_lengths(self, small_run):
        assert small_run.evaluations == 25
        assert len(small_run.samples) == 25
        assert len(small_run.acquisition_history) == 25 - 21

    def test_every_sample_is_feasible(self, small_run):
        spec = small_run.spec
        for rec in small_run.samples:
            assert spec.bounds.contains(rec.toll.as_array(), atol=1e-9)
            assert check_smoothing(rec.toll, spec.alpha, spec.beta)

    def test_best_is_minimum_over_samples(self, small_run):
        objs = [r.objective for r in small_run.samples]
        assert small_run.best.objective == min(objs)

    def test_best_so_far_is_nonincreasing(self, small_run):
        series = small_run.best_so_far()
        finite = series[np.isfinite(series)]
        assert all(b <= a for a, b in zip(finite, finite[1:]))

    def test_single_objective_mode_records_no_constraint_model(self, small_run):
        assert small_run.spec.delta_max is None
        assert small_run.method == "rk"

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            optimize(make_desk_spec(), method="annealing", seed=0)

    def test_run_artifacts_round_trip(self, small_run, tmp_path):
        write_run_dir(small_run, tmp_path)
        assert (tmp_path / "samples.csv").exists()
        assert (tmp_path / "convergence.csv").exists()
        assert (tmp_path / "best.json").exists()
        assert (tmp_path / "evals" / "eval_0000.csv").exists()
        records = load_samples_csv(tmp_path / "samples.csv")
        assert len(records) == len(small_run.samples)
        for a, b in zip(small_run.samples, records):
            assert np.array_equal(a.toll.as_array(), b.toll.as_array())
            assert a.objective == b.objective
            assert a.constraint == b.constraint
            assert a.origin == b.origin
