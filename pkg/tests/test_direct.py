import math

import numpy as np
import pytest

import tollopt.direct as direct_mod
from tollopt.direct import (HyperRect, direct_minimize, penalized_objective,
                            potentially_optimal)


def jones_oracle(rects, f_min, eps):
    """Independent potentially-optimal check: for each rectangle, derive the
    feasible interval for the rate constant K from the pairwise inequalities
    and test whether it intersects (0, inf)."""
    selected = []
    for j, rj in enumerate(rects):
        dj, fj = rj.diameter, rj.f_center
        if not np.isfinite(fj):
            continue
        k_lo = (fj - f_min + eps * abs(f_min)) / dj
        k_hi = math.inf
        ok = True
        for i, ri in enumerate(rects):
            if i == j:
                continue
            di, fi = ri.diameter, ri.f_center
            if di == dj:
                if fi < fj:
                    ok = False
                    break
            elif di < dj:
                k_lo = max(k_lo, (fj - fi) / (dj - di))
            else:
                k_hi = min(k_hi, (fi - fj) / (di - dj))
        if ok and k_hi > 0.0 and k_lo <= k_hi:
            selected.append(rj.index)
    return selected


def test_first_evaluation_is_the_box_center():
    calls = []

    def f(x):
        calls.append(x.copy())
        return (x[0] - 0.3) ** 2

    direct_minimize(f, (np.zeros(1), np.ones(1)), max_evals=1)
    assert len(calls) == 1
    assert calls[0][0] == pytest.approx(0.5)


def test_quadratic_minimized_within_budget():
    calls = []

    def f(x):
        calls.append(float(x[0]))
        return (x[0] - 0.3) ** 2

    point, value, history = direct_minimize(f, (np.zeros(1), np.ones(1)), max_evals=50)
    assert calls[0] == pytest.approx(0.5)
    assert f(np.array([0.5])) == pytest.approx(0.04)
    assert abs(point[0] - 0.3) <= 1e-2
    assert len(calls) - 1 <= 50 + 20      # completes the final iteration only


def test_runs_are_deterministic():
    seq_a, seq_b = [], []

    def make_f(seq):
        def f(x):
            seq.append(tuple(np.round(x, 12)))
            return float(np.sin(5 * x[0]) * np.cos(3 * x[1]) + x[0])
        return f

    ra = direct_minimize(make_f(seq_a), (np.zeros(2), np.ones(2)), max_evals=60)
    rb = direct_minimize(make_f(seq_b), (np.zeros(2), np.ones(2)), max_evals=60)
    assert seq_a == seq_b
    assert np.array_equal(ra[0], rb[0]) and ra[1] == rb[1]


def test_history_accrues_in_iteration_bursts():
    _, _, history = direct_minimize(lambda x: (x[0] - 0.3) ** 2 + (x[1] - 0.6) ** 2,
                                    (np.zeros(2), np.ones(2)), max_evals=50)
    evals = [e for e, _ in history]
    assert evals[0] == 1
    diffs = np.diff(evals)
    assert np.all(diffs >= 2)              # each iteration samples at least one pair
    best = [v for _, v in history]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))


def test_incumbent_monotone_and_budget_overshoot_bounded():
    count = {"n": 0}

    def f(x):
        count["n"] += 1
        return float(np.sum((x - 0.37) ** 2))

    _, _, history = direct_minimize(f, (np.zeros(3), np.ones(3)), max_evals=40)
    assert history[-1][0] == count["n"]
    assert count["n"] >= 40                # budget exhausted
    assert count["n"] - history[-2][0] <= 6 * 3 * 2 * 10  # one iteration of overshoot


def test_selection_matches_jones_oracle_on_every_iteration(monkeypatch):
    snapshots = []
    original = direct_mod.potentially_optimal

    def recording(rects, f_min, eps):
        result = original(rects, f_min, eps)
        snapshots.append(([HyperRect(r.center.copy(), r.levels.copy(), r.f_center, r.index)
                           for r in rects], f_min, eps, sorted(r.index for r in result)))
        return result

    monkeypatch.setattr(direct_mod, "potentially_optimal", recording)
    direct_minimize(lambda x: (x[0] - 0.21) ** 2 + 2.0 * (x[1] - 0.67) ** 2,
                    (np.zeros(2), np.ones(2)), max_evals=50)
    assert len(snapshots) >= 3
    for rects, f_min, eps, selected in snapshots:
        assert selected == sorted(jones_oracle(rects, f_min, eps))


def test_partition_tiles_the_box_with_distinct_centers(monkeypatch):
    snapshots = []
    original = direct_mod.potentially_optimal

    def recording(rects, f_min, eps):
        snapshots.append([HyperRect(r.center.copy(), r.levels.copy(), r.f_center, r.index)
                          for r in rects])
        return original(rects, f_min, eps)

    monkeypatch.setattr(direct_mod, "potentially_optimal", recording)
    direct_minimize(lambda x: float(np.sum((x - 0.3) ** 2)),
                    (np.zeros(2), np.ones(2)), max_evals=80)
    rects = snapshots[-1]
    volumes = [float(np.prod(r.side_lengths)) for r in rects]
    assert sum(volumes) == pytest.approx(1.0, rel=1e-9)
    centers = {tuple(np.round(r.center, 12)) for r in rects}
    assert len(centers) == len(rects)


def test_non_finite_values_never_become_potentially_optimal():
    def f(x):
        if x[0] < 0.33:
            return math.nan
        return float(x[0])

    point, value, _ = direct_minimize(f, (np.zeros(1), np.ones(1)), max_evals=30)
    assert np.isfinite(value)
    assert point[0] >= 0.33


def test_invalid_budget_rejected():
    with pytest.raises(ValueError):
        direct_minimize(lambda x: 0.0, (np.zeros(1), np.ones(1)), max_evals=0)


class TestPenalizedObjective:
    def test_feasible_point_passes_through(self):
        g = penalized_objective(lambda x: x[0], [lambda x: x[0] - 10.0], rho=100.0)
        assert g(np.array([2.0])) == 2.0

    def test_quadratic_penalty_hand_value(self):
        # adjacent rates 0 and 1 against a 0.33 limit at weight 100
        alpha = 0.33

        def violation(x):
            return abs(x[0] - x[1]) - alpha

        g = penalized_objective(lambda x: 0.0, [violation], rho=100.0)
        assert g(np.array([0.0, 1.0])) == pytest.approx(100.0 * (1.0 - 0.33) ** 2)
        assert g(np.array([0.0, 1.0])) == pytest.approx(44.89)

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            penalized_objective(lambda x: 0.0, [], rho=0.0)
        with pytest.raises(ValueError):
            penalized_objective(lambda x: 0.0, [], rho=-1.0)
