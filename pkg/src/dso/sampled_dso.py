"""Truncated oracle from sampled subgraphs, for small radii.

The idea: a subgraph that drops each element with probability 1/r is
simultaneously likely to drop any given failure and to keep any given
short path intact.  ceil(8*C*r*ln n) independent edge-dropping samples
plus as many vertex-dropping samples give every (failure, short path)
combination a good sample with high probability; a query takes the
minimum stored distance over the samples that dropped its failure.

Two structural facts carry the probabilistic argument and are cheap to
check outright, so the build verifies them and resamples on violation:
every failure must be dropped by at least one sample, and by at most
24*C*ln n of them (three times the expectation, so a resample signals a
bug or a pathological seed rather than routine bad luck).

Stored distances are clipped to r and packed into the smallest unsigned
dtype that holds r, which is what keeps four hundred vertices times a
few thousand samples inside a laptop's memory.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix

from .graph_core import Failure, Graph
from .truncated_apsp import truncated_distances_csr


class SampledBuildError(RuntimeError):
    pass


def _dtype_for(radius: int):
    if radius <= np.iinfo(np.uint8).max:
        return np.uint8
    if radius <= np.iinfo(np.uint16).max:
        return np.uint16
    return np.uint32


class SampledOracle:
    """r-truncated distance sensitivity oracle over sampled subgraphs."""

    def __init__(self, g: Graph, radius: int, C: float = 4.0, seed: int = 0,
                 max_retries: int = 8):
        if radius < 2:
            raise ValueError("sampling needs radius at least 2")
        self.graph = g
        self.radius = radius
        self.C = C
        self.seed = seed
        n = g.n
        self.sample_count = math.ceil(8 * C * radius * math.log(max(n, 2)))
        self.index_cap = 24 * C * math.log(max(n, 2))
        self.preprocess_count = 0
        self.query_count = 0

        # Arcs presorted by (tail, head, weight, id): after any subset mask
        # the first arc of each (tail, head) run is the cheapest parallel.
        arcs = g.arcs
        order = sorted(range(len(arcs)), key=lambda i: (arcs[i][0], arcs[i][1], arcs[i][2], i))
        self._tails = np.array([arcs[i][0] for i in order], dtype=np.int64)
        self._heads = np.array([arcs[i][1] for i in order], dtype=np.int64)
        self._weights = np.array([arcs[i][2] for i in order], dtype=np.float64)
        # Edge identity per sorted arc: which input edge drops this arc.
        step = 1 if g.directed else 2
        self._edge_of_arc = np.array([order[j] // step for j in range(len(order))],
                                     dtype=np.int64)
        self._num_edges = len(g.edges)
        self._build(max_retries)
        self.preprocess_count += 1

    # -- construction ---------------------------------------------------------

    def _subgraph_distances(self, arc_mask: np.ndarray) -> np.ndarray:
        n = self.graph.n
        t, h, w = self._tails[arc_mask], self._heads[arc_mask], self._weights[arc_mask]
        key = t * n + h
        first = np.ones(len(key), dtype=bool)
        first[1:] = key[1:] != key[:-1]  # cheapest parallel survivor wins
        sparse = csr_matrix((w[first], (t[first], h[first])), shape=(n, n))
        return truncated_distances_csr(sparse, self.radius)

    def _build(self, max_retries: int) -> None:
        g, n, r = self.graph, self.graph.n, self.radius
        keep_p = 1.0 - 1.0 / r
        dtype = _dtype_for(r)
        for retry in range(max_retries):
            ss = np.random.SeedSequence(entropy=(self.seed, retry))
            streams = ss.spawn(2 * self.sample_count)
            edge_stack = np.empty((self.sample_count, n, n), dtype=dtype)
            vert_stack = np.empty((self.sample_count, n, n), dtype=dtype)
            edge_dropped: list[np.ndarray] = []
            vert_dropped: list[np.ndarray] = []
            for i in range(self.sample_count):
                rng = np.random.default_rng(streams[2 * i])
                keep_edge = rng.random(self._num_edges) < keep_p
                dist = self._subgraph_distances(keep_edge[self._edge_of_arc])
                np.minimum(dist, r, out=dist)
                edge_stack[i] = dist
                edge_dropped.append(np.flatnonzero(~keep_edge))

                rng = np.random.default_rng(streams[2 * i + 1])
                keep_vert = rng.random(n) < keep_p
                mask = keep_vert[self._tails] & keep_vert[self._heads]
                dist = self._subgraph_distances(mask)
                dead = np.flatnonzero(~keep_vert)
                dist[dead, :] = np.inf
                dist[:, dead] = np.inf
                np.minimum(dist, r, out=dist)
                vert_stack[i] = dist
                vert_dropped.append(dead)

            vert_index = [[] for _ in range(n)]
            for i, dead in enumerate(vert_dropped):
                for v in dead.tolist():
                    vert_index[v].append(i)
            edge_index = [[] for _ in range(self._num_edges)]
            for i, dropped in enumerate(edge_dropped):
                for e in dropped.tolist():
                    edge_index[e].append(i)

            lengths = [len(ix) for ix in vert_index] + [len(ix) for ix in edge_index]
            if lengths and (min(lengths) < 1 or max(lengths) > self.index_cap):
                continue
            self.edge_stack = edge_stack
            self.vert_stack = vert_stack
            self._vert_index = [np.array(ix, dtype=np.int64) for ix in vert_index]
            self._edge_index = [np.array(ix, dtype=np.int64) for ix in edge_index]
            return
        raise SampledBuildError(
            f"failure coverage check failed {max_retries} times (n={n}, r={r})")

    def _index_for(self, f: Failure) -> tuple[np.ndarray, np.ndarray]:
        if f.kind == "vertex":
            return self._vert_index[f.id], self.vert_stack
        step = 1 if self.graph.directed else 2
        return self._edge_index[f.id // step], self.edge_stack

    # -- queries ----------------------------------------------------------------

    def query(self, u: int, v: int, f: Failure) -> float:
        self.query_count += 1
        f = self.graph.check_failure(f)
        if f.kind == "vertex" and (u == f.id or v == f.id):
            return float(self.radius)
        if u == v:
            return 0.0
        idx, stack = self._index_for(f)
        if len(idx) == 0:
            return float(self.radius)
        return float(stack[idx, u, v].min())

    def query_many(self, triples) -> list[float]:
        triples = list(triples)
        self.query_count += len(triples)
        out = np.empty(len(triples))
        groups: dict[Failure, tuple[list[int], list[int], list[int]]] = {}
        for pos, (u, v, f) in enumerate(triples):
            f = self.graph.check_failure(f)
            if f.kind == "vertex" and (u == f.id or v == f.id):
                out[pos] = self.radius
            elif u == v:
                out[pos] = 0.0
            else:
                slot = groups.setdefault(f, ([], [], []))
                slot[0].append(pos)
                slot[1].append(u)
                slot[2].append(v)
        for f, (pos, us, vs) in groups.items():
            idx, stack = self._index_for(f)
            if len(idx) == 0:
                out[pos] = self.radius
                continue
            got = stack[idx[:, None], np.array(us)[None, :], np.array(vs)[None, :]]
            out[pos] = got.min(axis=0)
        return out.tolist()

    def query_row(self, u: int, f: Failure) -> np.ndarray:
        """min(d(u, x, f), r) for every x at once; endpoint conventions
        are NOT applied (callers mask their own endpoints)."""
        self.query_count += self.graph.n
        idx, stack = self._index_for(self.graph.check_failure(f))
        if len(idx) == 0:
            return np.full(self.graph.n, float(self.radius))
        return stack[idx, u, :].min(axis=0).astype(np.float64)

    def query_col(self, v: int, f: Failure) -> np.ndarray:
        self.query_count += self.graph.n
        idx, stack = self._index_for(self.graph.check_failure(f))
        if len(idx) == 0:
            return np.full(self.graph.n, float(self.radius))
        return stack[idx, :, v].min(axis=0).astype(np.float64)

    def release_tables(self) -> None:
        """Drop the sample stacks (hundreds of MB at benchmark sizes) once a
        downstream stage has taken over answering."""
        self.edge_stack = None
        self.vert_stack = None
