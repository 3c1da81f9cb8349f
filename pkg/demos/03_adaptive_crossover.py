"""
Adaptive crossover
==================

Four single-parent operators compete. Each generation one is picked by
roulette on its weight, scored on how its children did, and every theta
evaluations the weights are recomputed from the scores.
"""

import numpy as np

from linkforge.evolve import Op, OperatorPortfolio, ScoreRule, crossover, recompute_weights, update_score

genes = np.arange(1, 13)
rng = np.random.default_rng(2)
for op in Op:
    print(f"{op.name:12s}", crossover(op, genes, 2, rng))

# scores: +30 for a new global best, +20 within 95% of the last best, else +10
rule = ScoreRule()
p = OperatorPortfolio.uniform(10)
p = update_score(p, Op.FLIP, local_best=110, last_best=100, global_best=105, rule=rule)
p = update_score(p, Op.RECOMBINE, local_best=97, last_best=100, global_best=110, rule=rule)
print("scores ", p.scores)
print("weights", np.round(recompute_weights(p).weights, 4))
