"""Brute-force reference oracles.

Everything in this module is deliberately slow and obviously correct: one
Dijkstra per question, no shared state with the fast structures.  The test
suite treats these as ground truth, so keep them free of any optimization
that could share a bug with the code under test.
"""

from __future__ import annotations

import numpy as np

from .graph_core import (
    UNREACHABLE,
    Failure,
    FailureView,
    Graph,
)
from .paths import dijkstra_from, dijkstra_to, distance_matrix


def brute_distance(g: Graph, u: int, v: int, f: Failure) -> float:
    """Shortest u -> v distance in the graph minus ``f``."""
    f = g.check_failure(f)
    if f.kind == "vertex" and (u == f.id or v == f.id):
        return UNREACHABLE
    view = g.remove_failure(f)
    return dijkstra_from(view, u)[v]


def replacement_matrix(g: Graph, f: Failure) -> np.ndarray:
    """All-pairs distances avoiding ``f``; failed-vertex rows/cols are inf."""
    f = g.check_failure(f)
    dist = distance_matrix(g.remove_failure(f))
    if f.kind == "vertex":
        dist[f.id, :] = np.inf
        dist[:, f.id] = np.inf
    return dist


class BruteTruncatedOracle:
    """Protocol-complete truncated oracle backed by per-failure Dijkstra.

    Answers ``min(d(u, v, f), radius)`` exactly.  Failure matrices are
    cached on first use, so exhaustive comparisons stay quadratic per
    failure rather than cubic.
    """

    def __init__(self, g: Graph, radius: float):
        self.graph = g
        self.radius = radius
        self.preprocess_count = 1
        self.query_count = 0
        self._cache: dict[Failure, np.ndarray] = {}

    def _matrix(self, f: Failure) -> np.ndarray:
        m = self._cache.get(f)
        if m is None:
            m = replacement_matrix(self.graph, f)
            self._cache[f] = m
        return m

    def query(self, u: int, v: int, f: Failure) -> float:
        self.query_count += 1
        f = self.graph.check_failure(f)
        if f.kind == "vertex" and (u == f.id or v == f.id):
            # Questions about a failed endpoint are answered with the cap.
            return self.radius
        if u == v:
            return 0.0
        return min(float(self._matrix(f)[u, v]), self.radius)

    def query_many(self, triples) -> list[float]:
        return [self.query(u, v, f) for (u, v, f) in triples]


# -- canonical shortest paths, the slow way -----------------------------------

_NO_ARC = -1


class CanonicalPaths:
    """Exact distances plus the arc-order tie-broken shortest-path family.

    Among all shortest u -> v paths, score each by the smallest arc id it
    uses and keep the maximum score; ``bottleneck[u, v]`` is that arc.  The
    canonical path splits at the bottleneck arc and recurses on both sides,
    which are strictly shorter subproblems because weights are positive.
    """

    def __init__(self, g: Graph | FailureView):
        view = g.view() if isinstance(g, Graph) else g
        self.graph = view.base
        n = view.n
        self.dist = distance_matrix(view)
        sentinel = len(self.graph.arcs)  # +inf inside min(), beats every id
        bottleneck = np.full((n, n), _NO_ARC, dtype=np.int64)
        for v in range(n):
            to_v = dijkstra_to(view, v)
            mm = [_NO_ARC] * n
            mm[v] = sentinel
            order = sorted((x for x in range(n) if to_v[x] < float("inf")),
                           key=lambda x: to_v[x])
            for x in order:
                if x == v:
                    continue
                best = _NO_ARC
                for (h, w, idx) in view.out_adj[x]:
                    if to_v[x] != w + to_v[h]:
                        continue  # arc not on any shortest x -> v path
                    score = min(idx, mm[h])
                    if score > best:
                        best = score
                mm[x] = best
            for x in range(n):
                if x != v and mm[x] != _NO_ARC:
                    bottleneck[x, v] = mm[x]
        self.bottleneck = bottleneck
        self._path_cache: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] = {}

    def path(self, u: int, v: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Canonical path as (vertex sequence, arc id sequence).

        Raises ValueError when v is unreachable from u.
        """
        key = (u, v)
        got = self._path_cache.get(key)
        if got is not None:
            return got
        if u == v:
            result = ((u,), ())
        else:
            e = int(self.bottleneck[u, v])
            if e == _NO_ARC:
                raise ValueError(f"no path {u} -> {v}")
            a, b, _ = self.graph.arcs[e]
            pre_v, pre_e = self.path(u, a)
            suf_v, suf_e = self.path(b, v)
            result = (pre_v + suf_v, pre_e + (e,) + suf_e)
        self._path_cache[key] = result
        return result

    def vertex_on_path(self, u: int, v: int, x: int) -> bool:
        if self.dist[u, v] == np.inf:
            return False
        return x in self.path(u, v)[0]

    def edge_on_path(self, u: int, v: int, e: int) -> bool:
        if self.dist[u, v] == np.inf:
            return False
        e = self.graph.canonical_edge_id(e)
        g = self.graph
        return any(g.canonical_edge_id(a) == e for a in self.path(u, v)[1])


def hop_bounded_distances(g: Graph, hops: int) -> np.ndarray:
    """Shortest-walk lengths using at most ``hops`` arcs, by plain
    round-by-round relaxation.  Reference for the capped all-pairs kernel."""
    n = g.n
    out = np.full((n, n), np.inf)
    for u in range(n):
        dist = [float("inf")] * n
        dist[u] = 0.0
        for _ in range(hops):
            new = dist[:]
            changed = False
            for (a, b, w) in g.arcs:
                cand = dist[a] + w
                if cand < new[b]:
                    new[b] = cand
                    changed = True
            dist = new
            if not changed:
                break
        out[u] = dist
    return out


def exhaustive_bottleneck(g: Graph, u: int, v: int, limit: int = 200_000) -> int:
    """Bottleneck arc by enumerating every shortest u -> v path outright.

    Independent second route for cross-checking :class:`CanonicalPaths`
    on small graphs; gives up past ``limit`` explored prefixes.
    """
    if u == v:
        return _NO_ARC
    to_v = dijkstra_to(g.view(), v)
    if to_v[u] == float("inf"):
        return _NO_ARC
    best = _NO_ARC
    budget = limit
    # Stack of (vertex, smallest arc id so far); sentinel = len(arcs).
    stack = [(u, len(g.arcs))]
    while stack:
        x, low = stack.pop()
        budget -= 1
        if budget < 0:
            raise RuntimeError("path enumeration budget exhausted")
        if x == v:
            if low > best:
                best = low
            continue
        for (h, w, idx) in g.out_adj[x]:
            if to_v[x] == w + to_v[h]:
                stack.append((h, min(low, idx)))
    return best
