"""Capping congestion heterogeneity: the constrained toll problem.

Pushing the zone hard toward its target density induces a heterogeneous
recovery (a large deviation from the spread envelope).  Capping the mean
deviation turns the problem into constrained infill: expected improvement
times the probability of staying below the limit.  The constrained optimum
trades objective quality for homogeneity, in the expected direction.
Takes about a minute.
"""

import numpy as np

from tollopt import desk_preset, optimize
from tollopt.tlp import ProblemSpec
from tollopt.toll import Bounds

config = desk_preset()
base = dict(config=config, bounds=Bounds.uniform(config.m, 1.0, 15.0),
            alpha=1.0 / 3.0, beta=5.0, replications=2, budget=40)

free = optimize(ProblemSpec(**base), method="rk", seed=11)
zero = next(r for r in free.samples if np.allclose(r.toll.as_array(), 0.0))

# bracketing rule: the limit belongs between the zero-toll deviation and the
# deviation of the unconstrained optimum
delta_max = 0.5 * (zero.constraint + free.best.constraint)
print(f"zero-toll deviation {zero.constraint:.2f}, unconstrained optimum "
      f"deviation {free.best.constraint:.2f} -> limit {delta_max:.2f}\n")

capped = optimize(ProblemSpec(**base, delta_max=delta_max), method="rk", seed=12)

print(f"{'':>14} {'objective':>10} {'deviation':>10}")
print(f"{'unconstrained':>14} {free.best.objective:>10.2f} {free.best.constraint:>10.2f}")
print(f"{'constrained':>14} {capped.best.objective:>10.2f} {capped.best.constraint:>10.2f}")
print(f"\nconstraint satisfied: {capped.best.constraint <= delta_max}")
print("the constrained solution gives up objective value for a more even "
      "congestion distribution")

v = np.round(capped.best.toll.distance_rates, 3)
w = np.round(capped.best.toll.delay_rates, 2)
print(f"\nconstrained toll pattern: distance {v}, delay {w}")
