"""Plain shortest-path primitives shared by the oracle builders.

Single-source routines are textbook binary-heap Dijkstra over adjacency
views; the all-pairs matrix goes through scipy's compiled kernel.  Nothing
here knows about tie-breaking: callers that need a canonical choice among
equal-length paths do their own pass over the tight arcs.
"""

from __future__ import annotations

import heapq

import numpy as np
from scipy.sparse import csgraph

from .graph_core import FailureView


def dijkstra_from(view: FailureView, source: int) -> list[float]:
    """Distances from ``source`` in the view; unreachable entries are inf."""
    n = view.n
    dist = [float("inf")] * n
    if not view.vertex_alive(source):
        return dist
    dist[source] = 0.0
    heap = [(0.0, source)]
    out = view.out_adj
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for (h, w, _) in out[x]:
            nd = d + w
            if nd < dist[h]:
                dist[h] = nd
                heapq.heappush(heap, (nd, h))
    return dist


def dijkstra_to(view: FailureView, target: int) -> list[float]:
    """Distances to ``target``: one reverse-graph Dijkstra."""
    n = view.n
    rev: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for x in range(n):
        for (h, w, _) in view.out_adj[x]:
            rev[h].append((x, w))
    dist = [float("inf")] * n
    if not view.vertex_alive(target):
        return dist
    dist[target] = 0.0
    heap = [(0.0, target)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for (t, w) in rev[x]:
            nd = d + w
            if nd < dist[t]:
                dist[t] = nd
                heapq.heappush(heap, (nd, t))
    return dist


def one_hop_matrix(view: FailureView) -> np.ndarray:
    """Min weight per ordered pair, inf where no arc (diagonal included)."""
    n = view.n
    hop = np.full((n, n), np.inf)
    for x in range(n):
        for (h, w, _) in view.out_adj[x]:
            if w < hop[x, h]:
                hop[x, h] = w
    return hop


def distance_matrix(view: FailureView, indices=None) -> np.ndarray:
    """All-pairs (or selected-rows) distances via the compiled kernel."""
    hop = one_hop_matrix(view)
    sparse = csgraph.csgraph_from_dense(hop, null_value=np.inf)
    return csgraph.dijkstra(sparse, directed=True, indices=indices)
