"""Build a full oracle on a small random digraph and spot-check it.

Run:  python3 demos/quickstart.py
"""

import numpy as np

from dso.baseline_oracle import replacement_matrix
from dso.graph_core import edge_failure, is_unreachable, vertex_failure
from dso.harness_cli import generate_graph
from dso.pipeline import DsoConfig, build_full_dso

g = generate_graph(n=30, m=90, M=4, directed=True, seed=11)
dso = build_full_dso(g, DsoConfig(seed=11))
print(f"graph: n={g.n} m={len(g.edges)} M={g.M}")
print(f"built {len(dso.stages)} stages, final radius {dso.oracle.radius} "
      f"(cut for unreachable: {dso.unreachable_cut})")

# a few hand-picked failures, checked against per-failure Dijkstra
rng = np.random.default_rng(3)
shown = 0
while shown < 8:
    u, v = rng.integers(g.n, size=2)
    f = (vertex_failure(int(rng.integers(g.n))) if shown % 2
         else edge_failure(int(rng.integers(len(g.edges)))))
    if u == v or (f.kind == "vertex" and f.id in (int(u), int(v))):
        continue
    got = dso.query(int(u), int(v), f)
    want = float(replacement_matrix(g, f)[u, v])
    tag = "unreachable" if is_unreachable(got) else f"{got:g}"
    ok = is_unreachable(got) if is_unreachable(want) else got == want
    print(f"  d({u:2d} -> {v:2d} | drop {f.kind} {f.id:3d}) = {tag:>11s}   "
          f"{'ok' if ok else 'MISMATCH, expected ' + str(want)}")
    shown += 1
