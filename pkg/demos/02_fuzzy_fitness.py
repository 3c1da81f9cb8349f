"""
Fuzzy fitness
=============

Most offspring are not decoded. They get the baseline's profit scaled by a
Gaussian similarity to the baseline chromosome.
"""

import numpy as np

from linkforge.ffem import Baseline, FfemConfig, evaluate_offspring, sigma, similarity

cfg = FfemConfig()

# sigma shrinks slightly as the baseline gets closer to the upper bound
for f in (0.0, 0.5, 1.0):
    print(f"normalised fitness {f:.1f}: sigma {sigma(f, cfg):.4f}")

# one swapped pair out of ten positions
c = np.arange(10)
x = c.copy()
x[[2, 7]] = x[[7, 2]]
print("mu for one swap:", round(similarity(x, c, sigma(0.5, cfg)), 4))

# a batch of random children: about one in ten goes through the real decoder
rng = np.random.default_rng(4)
base = Baseline(rng.permutation(50), fitness=800.0, upper_bound=2000.0)
kids = [rng.permutation(50) for _ in range(1000)]
recs = evaluate_offspring(kids, base, cfg, rng, real_eval=lambda g: 0.0)
real = sum(r.method.value == "real" for r in recs)
print(f"{real} of {len(recs)} evaluated for real")
