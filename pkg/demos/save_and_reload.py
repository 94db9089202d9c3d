"""Serialize a built oracle and answer queries from the blob alone.

The byte format is a header plus the query tables; reloading needs no
graph rebuild and no randomness, and two builds from the same seed
produce identical bytes.

Run:  python3 demos/save_and_reload.py
"""

from dso.graph_core import vertex_failure
from dso.harness_cli import generate_graph
from dso.pipeline import DsoConfig, FullDso, build_full_dso

g = generate_graph(n=25, m=75, M=3, directed=True, seed=2)
dso = build_full_dso(g, DsoConfig(seed=2))
blob = dso.to_bytes()
print(f"serialized {len(dso.stages)} stages to {len(blob)} bytes")

again = build_full_dso(g, DsoConfig(seed=2)).to_bytes()
print(f"rebuild with the same seed is byte-identical: {blob == again}")

back = FullDso.from_bytes(blob)
bad = sum(
    back.query(u, v, f) != dso.query(u, v, f)
    for f in (vertex_failure(x) for x in range(g.n))
    for u in range(g.n)
    for v in range(g.n)
    if u != v and f.id not in (u, v)
)
print(f"reloaded oracle disagrees on {bad} of all vertex-failure queries")
