"""End-to-end construction: from a graph to a full distance sensitivity oracle.

The ladder starts from a sampled oracle at a small radius r0 = max(ceil(n^a),
3M, 2), converts it to constant-lookup form, and then alternates radius
extension (factor 1.5) with re-conversion until the radius covers every
finite distance (n * M exceeds any simple path).  The canonical-path
structure and the vertex priorities are computed once and shared by every
conversion stage; each stage batches its questions to the previous stage
and afterwards drops the reference, so at most two stages are alive at a
time.

Query values at or above n * M mean unreachable and are mapped to the
public UNREACHABLE sentinel.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .apsp_tiebreak import build_canonical_apsp
from .extend_dso import ExtendedOracle
from .fast_dso import FastOracle, assign_priorities
from .graph_core import UNREACHABLE, Failure, Graph
from .sampled_dso import SampledOracle

_MAGIC = b"DSO\x01"

_ARRAY_ORDER = (
    "edges", "dist", "hop", "tin", "tout", "parc", "first", "last", "top",
    "prio", "poff", "soff", "pv", "pe", "sv", "se", "segs", "keyv",
)


@dataclass(frozen=True)
class DsoConfig:
    base_exponent: float = 0.276724   # r0 grows as n**base_exponent
    C: float = 4.0
    seed: int = 0
    threads: int | None = None


def base_radius(n: int, M: int, exponent: float) -> int:
    return max(math.ceil(n ** exponent), 3 * M, 2)


def extension_count(n: int, M: int, r0: int) -> int:
    """Extensions needed for r0 * 1.5^k to reach n * M."""
    if r0 >= n * M:
        return 0
    return math.ceil(math.log(n * M / r0, 1.5))


def build_full_dso(g: Graph, config: DsoConfig | None = None) -> "FullDso":
    cfg = config or DsoConfig()
    n, M = g.n, g.M
    r0 = base_radius(n, M, cfg.base_exponent)
    goal = n * M
    seeds = np.random.SeedSequence(cfg.seed).generate_state(
        2 * extension_count(n, M, r0) + 4, dtype=np.uint32).tolist()
    stages: list[dict] = []

    limiter = _thread_limiter(cfg.threads)
    with limiter:
        apsp = build_canonical_apsp(g)
        ctx = assign_priorities(apsp, C=cfg.C, seed=seeds[0])

        base = SampledOracle(g, r0, C=cfg.C, seed=seeds[1])
        stages.append({"kind": "sampled", "radius": r0,
                       "samples": 2 * base.sample_count})
        fast = FastOracle(base, apsp, ctx, C=cfg.C)
        base.release_tables()
        fast.release_inner()
        stages.append({"kind": "fast", "radius": fast.radius,
                       "inner_queries": fast.build_inner_queries})

        k = 2
        while fast.radius < goal:
            ext = ExtendedOracle(fast, g, C=cfg.C, seed=seeds[k], dist=apsp.dist)
            stages.append({"kind": "extend", "radius": ext.radius,
                           "bridges": len(ext.bridges)})
            nxt = FastOracle(ext, apsp, ctx, C=cfg.C)
            nxt.release_inner()
            stages.append({"kind": "fast", "radius": nxt.radius,
                           "inner_queries": nxt.build_inner_queries})
            fast = nxt
            k += 1

    return FullDso(g, fast, cfg, stages)


def _thread_limiter(threads: int | None):
    if threads is None:
        import contextlib
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=threads)
    except ImportError:
        import contextlib
        return contextlib.nullcontext()


class FullDso:
    """Exact distance sensitivity oracle over the whole distance range.

    ``query(u, v, f)`` returns the shortest u -> v distance once failure f
    is removed, or UNREACHABLE.  A failed vertex equal to an endpoint is a
    caller error here (the truncated stages' internal convention never
    leaks out).
    """

    def __init__(self, graph: Graph, oracle: FastOracle, config: DsoConfig,
                 stages: list[dict]):
        self.graph = graph
        self.oracle = oracle
        self.config = config
        self.stages = stages
        self.unreachable_cut = graph.n * graph.M
        self.query_count = 0

    def query(self, u: int, v: int, f: Failure) -> float:
        n = self.graph.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"endpoint out of range for {n} vertices")
        f = self.graph.check_failure(f)
        if f.kind == "vertex" and (f.id == u or f.id == v):
            raise ValueError("failed vertex coincides with a query endpoint")
        self.query_count += 1
        if u == v:
            return 0.0
        val = self.oracle.query(u, v, f)
        return UNREACHABLE if val >= self.unreachable_cut else float(val)

    # -- serialization ----------------------------------------------------------

    def to_bytes(self) -> bytes:
        o = self.oracle
        n = self.graph.n
        meta = {
            "n": n, "M": self.graph.M, "directed": self.graph.directed,
            "radius": float(o.radius), "c_levels": o._L,
            "config": {"base_exponent": self.config.base_exponent,
                       "C": self.config.C, "seed": self.config.seed},
            "stages": self.stages,
        }
        arrays = {
            "edges": np.array(self.graph.edges, dtype=np.int64).reshape(-1, 3),
            "dist": np.array(o._dist),
            "hop": np.array(o._hop, dtype=np.int64),
            "tin": np.array(o._tin, dtype=np.int64),
            "tout": np.array(o._tout, dtype=np.int64),
            "parc": np.array(o._parc, dtype=np.int64),
            "first": np.array(o._first, dtype=np.int64),
            "last": np.array(o._last, dtype=np.int64),
            "top": np.array(o._top, dtype=np.int64),
            "prio": np.array(o._prio, dtype=np.int64),
            "poff": np.array(o._poff, dtype=np.int64),
            "soff": np.array(o._soff, dtype=np.int64),
            "pv": np.array(o._pv), "pe": np.array(o._pe),
            "sv": np.array(o._sv), "se": np.array(o._se),
            "segs": np.array(o._segs), "keyv": np.array(o._keyv),
        }
        buf = io.BytesIO()
        buf.write(_MAGIC)
        head = json.dumps(meta).encode()
        buf.write(len(head).to_bytes(8, "little"))
        buf.write(head)
        # plain concatenated .npy records in _ARRAY_ORDER: self-delimiting
        # and, unlike a zip container, free of timestamps, so equal builds
        # serialize to equal bytes
        for name in _ARRAY_ORDER:
            np.save(buf, arrays[name], allow_pickle=False)
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FullDso":
        if blob[:4] != _MAGIC:
            raise ValueError("not a serialized oracle (bad magic or version)")
        hlen = int.from_bytes(blob[4:12], "little")
        meta = json.loads(blob[12:12 + hlen].decode())
        stream = io.BytesIO(blob[12 + hlen:])
        arrays = {name: np.load(stream, allow_pickle=False)
                  for name in _ARRAY_ORDER}
        edges = [tuple(int(x) for x in row) for row in arrays["edges"]]
        g = Graph(meta["n"], edges, M=meta["M"], directed=meta["directed"])
        o = FastOracle.__new__(FastOracle)
        o.inner = None
        o.apsp = None
        o.ctx = None
        o.graph = g
        o.radius = meta["radius"]
        o.preprocess_count = 1
        o.query_count = 0
        o.total_lookups = 0
        o.last_lookup_count = 0
        o._n = meta["n"]
        o._L = meta["c_levels"]
        o._dist = arrays["dist"].tolist()
        o._hop = arrays["hop"].tolist()
        o._tin = arrays["tin"].tolist()
        o._tout = arrays["tout"].tolist()
        o._parc = arrays["parc"].tolist()
        o._first = arrays["first"].tolist()
        o._last = arrays["last"].tolist()
        o._top = arrays["top"].tolist()
        o._prio = arrays["prio"].tolist()
        o._poff = arrays["poff"].tolist()
        o._soff = arrays["soff"].tolist()
        o._pv = arrays["pv"].tolist()
        o._pe = arrays["pe"].tolist()
        o._sv = arrays["sv"].tolist()
        o._se = arrays["se"].tolist()
        o._segs = arrays["segs"].tolist()
        o._keyv = arrays["keyv"].tolist()
        o._tails = [a for (a, _, _) in g.arcs]
        o._heads = [b for (_, b, _) in g.arcs]
        cfg = DsoConfig(**meta["config"])
        return cls(g, o, cfg, meta["stages"])
