"""
Generating an instance and decoding a chromosome
================================================

A chromosome is just an ordering of task ids. The decoder walks it and gives
each task the longest slot still free on its satellite and ground antenna.
"""

import numpy as np

from linkforge import GenParams, decode, generate, profit_upper_bound, validate

# a small day: 40 tasks over 3 satellites and 2 stations
inst = generate(GenParams(40, n_satellites=3, n_stations=2, seed=1))
print(f"{len(inst)} tasks, upper bound {profit_upper_bound(inst):.0f}")

# two random orders usually give different schedules
rng = np.random.default_rng(0)
for _ in range(2):
    order = rng.permutation(inst.task_ids)
    sched = decode(order, inst)
    chained = sum(a.is_feed_switch for a in sched.assignments)
    print(f"placed {len(sched)} tasks ({chained} chained), profit {sched.profit:.0f}")

# the validator is independent of the decoder; it should find nothing
print("violations:", validate(sched, inst))

# the first few assignments
for a in sched.assignments[:5]:
    w = inst.task_window(a.task)
    print(f"task {a.task:2d} window [{w.evt}, {w.lvt}] -> [{a.start}, {a.end}]")
