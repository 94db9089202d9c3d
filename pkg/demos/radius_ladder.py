"""Watch the preprocessing ladder climb from the base radius to n * M.

Each rung alternates a radius extension (sampled bridge vertices over an
exact truncated core) with a table rebuild that restores constant-time
queries at the new radius.  The printout shows where the work goes: the
sampled base pays in shortest-path sweeps, every rebuild pays in queries
against the stage below it.

Run:  python3 demos/radius_ladder.py
"""

import math
import time

from dso.harness_cli import generate_graph
from dso.pipeline import DsoConfig, build_full_dso

n = 50
g = generate_graph(n=n, m=3 * n, M=2, directed=True, seed=5)
t0 = time.perf_counter()
dso = build_full_dso(g, DsoConfig(seed=5))
elapsed = time.perf_counter() - t0

budget = n * n * math.log2(n) ** 2
print(f"n={n} m={len(g.edges)} M={g.M}: {len(dso.stages)} stages "
      f"in {elapsed:.1f}s, goal radius {g.n * g.M}")
print(f"{'stage':>5s} {'kind':>8s} {'radius':>7s}  cost")
for i, s in enumerate(dso.stages):
    if s["kind"] == "sampled":
        cost = f"{s['samples']} truncated sweeps"
    elif s["kind"] == "extend":
        cost = f"{s['bridges']} bridge vertices"
    else:
        cost = (f"{s['inner_queries']} inner queries "
                f"({s['inner_queries'] / budget:.2f} of n^2 log2(n)^2)")
    print(f"{i:>5d} {s['kind']:>8s} {s['radius']:>7d}  {cost}")
