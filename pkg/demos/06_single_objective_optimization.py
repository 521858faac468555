"""End-to-end toll optimization: hold the zone at its target density.

The driver evaluates a space-filling initial plan (with the corner and
midpoint anchors), then alternates between refitting the kriging surrogate
and evaluating the expected-improvement maximizer, under common random
numbers across design points.  Takes around half a minute.
"""

import numpy as np

from tollopt import TollVector, convergence_history, desk_preset, optimize, simulate
from tollopt.tlp import ProblemSpec
from tollopt.toll import Bounds

config = desk_preset()
spec = ProblemSpec(config=config,
                   bounds=Bounds.uniform(config.m, 1.0, 15.0),
                   alpha=1.0 / 3.0, beta=5.0,
                   replications=2, budget=40)

run = optimize(spec, method="rk", seed=11)
zero = next(r for r in run.samples if np.allclose(r.toll.as_array(), 0.0))
best = run.best

print(f"evaluations: {run.evaluations} ({spec.initial_plan_size} initial + "
      f"{len(run.acquisition_history)} infill)")
print(f"zero-toll objective {zero.objective:.2f} -> optimized {best.objective:.2f} vpkmpl\n")

print(f"{'interval':>8} {'distance rate':>14} {'delay rate':>11}")
for h in range(spec.m):
    v, w = best.toll.rates_for_interval(h)
    print(f"{h + 1:>8} {v:>14.3f} {w:>11.2f}")

result = simulate(config, best.toll, run.rep_seeds[0])
print(f"\ninterval densities under the optimum: "
      f"{np.round(result.interval_density, 1)} (target {config.k_cr})")

raw, averaged = convergence_history(run)
print("\nacquisition history (windowed average of 4):", np.round(averaged, 3))
print("this short run is still exploring; at the full budget of 60 the "
      "trailing averages sink toward zero and the search can stop with confidence")
