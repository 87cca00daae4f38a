# The dyadic-robust variance needs a sum over every triad of agents: for
# each triad, the three pairs of dyads that share one agent. A direct loop is
# O(N^3); regrouping by the shared agent gives an O(N^2) formula.
#
#     python demos/02_triad_sum_shortcut.py

import time

import numpy as np

from dyadreg.vcov import SymScoreSet, sigma1_fast, sigma1_naive

rng = np.random.default_rng(0)

# Arbitrary symmetric "scores" are enough to compare the two paths.
for n in (10, 40, 80):
    sym = SymScoreSet.from_symmetric(rng.normal(size=(n, n, 3)))
    t0 = time.perf_counter()
    slow = sigma1_naive(sym)
    t1 = time.perf_counter()
    fast = sigma1_fast(sym)
    t2 = time.perf_counter()
    err = np.linalg.norm(fast - slow) / np.linalg.norm(slow)
    print(f"N={n:3d}: triad loop {t1 - t0:8.4f}s, shortcut {t2 - t1:8.5f}s, relative difference {err:.1e}")

# The printed normalization divides by N(N-1)(N-1). Dividing by N(N-1)(N-2),
# the number of dyad pairs sharing one agent, is available as an option.
sym = SymScoreSet.from_symmetric(rng.normal(size=(30, 30, 1)))
print("printed:", sigma1_fast(sym, "printed")[0, 0], " n-2:", sigma1_fast(sym, "n-2")[0, 0])
