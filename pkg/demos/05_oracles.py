"""
Exact references on tiny instances
==================================

With six tasks we can try all 720 orders. A placement search that ignores
the decoder shows where greedy decoding leaves profit on the table.
"""

from linkforge import GenParams, SolverConfig, generate, solve
from linkforge.model import make_instance
from linkforge.oracle import permutation_oracle, placement_oracle

inst = generate(GenParams(6, horizon=600, n_satellites=1, n_stations=1,
                          pass_length_range=(60, 200), seed=1001))
best = permutation_oracle(inst)
got = solve(inst, SolverConfig(max_evals=5000))
print(f"best over {best.enumerated} orders: {best.best_profit:.1f}, solver: {got.best_profit:.1f}")

# two tasks that only fit together as a feed-switch chain
fs = make_instance(300, [
    dict(sat=0, ant=0, gnd=0, evt=0, lvt=100, d=96, p=1.0),
    dict(sat=0, ant=1, gnd=1, evt=90, lvt=200, d=95, p=1.0),
])
for flag in (True, False):
    print(f"feed switch {flag}: permutation {permutation_oracle(fs, feed_switch=flag).best_profit:.0f}, "
          f"placement {placement_oracle(fs, feed_switch=flag).best_profit:.0f}")
