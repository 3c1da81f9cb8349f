"""
Solving and a small ablation
============================

The full method against the two ablated variants on one instance, at the
same evaluation budget.
"""

import numpy as np

from linkforge import GenParams, SolverConfig, Variant, generate, solve

inst = generate(GenParams(150, seed=3))

for variant in (Variant.FULL, Variant.NO_ADAPTIVE_CROSSOVER, Variant.NO_FFEM):
    runs = [solve(inst, SolverConfig(max_evals=2000, seed=s, variant=variant)) for s in range(3)]
    best = [r.best_profit for r in runs]
    real = np.mean([r.real_evals for r in runs])
    print(f"{variant.value:5s} mean {np.mean(best):10.0f}  real evals {real:6.0f}")

# the convergence series only ever goes up
res = solve(inst, SolverConfig(max_evals=2000))
for evals, best in res.convergence[::40]:
    print(f"{evals:5d} {best:10.0f}")
