"""Count table reads per query under a mixed workload.

Every query resolves through a fixed decision tree over precomputed
arrays; the number of array reads is bounded by a constant (documented
as 32) no matter the graph size.  Failures on the queried pair's own
shortest path are the expensive case, so the workload mixes uniform
triples with on-path failures half and half.

Run:  python3 demos/lookup_budget.py
"""

from collections import Counter

import numpy as np

from dso.harness_cli import _bench_queries, generate_graph
from dso.pipeline import DsoConfig, build_full_dso

n = 50
g = generate_graph(n=n, m=3 * n, M=1, directed=True, seed=7)
dso = build_full_dso(g, DsoConfig(seed=7))

rng = np.random.default_rng(1)
counts = Counter()
for (u, v, f) in _bench_queries(g, dso, 5000, rng):
    dso.query(u, v, f)
    counts[dso.oracle.last_lookup_count] += 1

total = sum(counts.values())
print(f"n={n}: {total} queries")
for k in sorted(counts):
    bar = "#" * max(1, round(40 * counts[k] / total))
    print(f"  {k:3d} reads  {counts[k]:5d}  {bar}")
print(f"mean {sum(k * c for k, c in counts.items()) / total:.2f}, "
      f"max {max(counts)} (bound: 32)")
