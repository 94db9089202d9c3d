"""Canonical tie-broken all-pairs shortest paths.

Ties between equal-length shortest paths are broken by arc id: score a
path by the smallest arc id on it, prefer the path with the largest score,
recurse on both sides of that arc.  The result is one canonical path per
reachable pair with two properties everything downstream relies on:

* subpaths of canonical paths are canonical;
* a failure that misses the canonical path leaves it canonical in the
  surviving graph.

The bottleneck table is built bottom-up over path length: seed direct
arcs, sweep integer lengths 2..2M one product each (every split of such a
path has both halves strictly shorter, so a full product over known legs
is exact), then grow the known radius geometrically by 3/2 per round.  A
round at radius r handles lengths in (r, ceil(3r/2)]: every such path has
an interior vertex whose prefix length lands in [len - r, r], because the
window is at least M wide and arc weights cannot jump over it.  Bridge
vertices are sampled at rate ~ c_H * M * ln(n) / r, which hits every
window with high probability once the warm sweep has pushed r past 2M.

Sampling makes the round Monte Carlo, and a missed window on the winning
path leaves a present-but-understated entry that no missingness test can
see.  Each sampled round is therefore audited: the band is recomputed
with every vertex as a bridge (exact by the window argument) and the two
results must agree, else the round is redone with a fresh, denser sample.
The audit costs one unsampled product per round, which is cheap at the
scales this package targets and makes the build's output deterministic
in distribution: always exact, only the running time is random.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .graph_core import Graph
from .paths import distance_matrix

_MISSING = -np.inf


class BridgedMatrixPair(NamedTuple):
    """Leg matrices for one side of a product, restricted to bridge columns
    (or rows, for the transposed right-hand side).

    ``D`` holds leg lengths in {1..r} with +inf where the leg is unusable;
    ``W`` holds the leg's bottleneck arc id with -inf in the same places.
    """

    D: np.ndarray
    W: np.ndarray


def distance_max_min_product(A: BridgedMatrixPair, B: BridgedMatrixPair,
                             target_dist: np.ndarray) -> np.ndarray:
    """Best two-leg split through any bridge, per pair.

    out[u, v] = max over bridges h with A.D[u, h] + B.D[h, v] equal to
    target_dist[u, v] of min(A.W[u, h], B.W[h, v]); -inf where no bridge
    splits the pair at its target length (or the target is infinite).
    """
    n, k = A.D.shape
    k2, n2 = B.D.shape
    if k != k2 or A.W.shape != A.D.shape or B.W.shape != B.D.shape:
        raise ValueError("leg matrices disagree on the number of bridges")
    if target_dist.shape != (n, n2):
        raise ValueError("target matrix shape mismatch")
    out = np.full((n, n2), _MISSING)
    finite = np.isfinite(target_dist)
    if not finite.any():
        return out
    for j in range(k):
        split = A.D[:, j:j + 1] + B.D[j:j + 1, :]
        hit = finite & (split == target_dist)
        if not hit.any():
            continue
        cand = np.minimum(A.W[:, j:j + 1], B.W[j:j + 1, :])
        np.copyto(out, cand, where=hit & (cand > out))
    return out


def _leg_pair(dist: np.ndarray, W: np.ndarray, radius: float,
              cols: np.ndarray | None = None,
              rows: np.ndarray | None = None) -> BridgedMatrixPair:
    """Mask legs to usable ones (length 1..radius) and slice to bridges."""
    usable = (dist >= 1) & (dist <= radius)
    D = np.where(usable, dist, np.inf)
    Wm = np.where(usable, W, _MISSING)
    if cols is not None:
        return BridgedMatrixPair(D[:, cols], Wm[:, cols])
    if rows is not None:
        return BridgedMatrixPair(D[rows, :], Wm[rows, :])
    return BridgedMatrixPair(D, Wm)


def _band_product(dist: np.ndarray, W: np.ndarray, legs_radius: float,
                  target: np.ndarray, bridges: np.ndarray) -> np.ndarray:
    left = _leg_pair(dist, W, legs_radius, cols=bridges)
    right = _leg_pair(dist, W, legs_radius, rows=bridges)
    return distance_max_min_product(left, right, target)


class BottleneckBuildError(RuntimeError):
    pass


def compute_bottleneck_table(g: Graph, c_H: float = 3.0, seed: int = 0,
                             audit: bool = True, max_retries: int = 16,
                             ) -> tuple[np.ndarray, np.ndarray]:
    """Distances plus the canonical bottleneck arc per reachable pair.

    Returns (dist, w_table); w_table[u, v] is an arc id, -1 on the
    diagonal and for unreachable pairs.  ``audit=False`` drops the
    per-round exactness audit and keeps only the missingness check.
    """
    n = g.n
    dist = distance_matrix(g.view())
    W = np.full((n, n), _MISSING)
    for idx, (a, b, wt) in enumerate(g.arcs):
        if wt == dist[a, b] and idx > W[a, b]:
            W[a, b] = idx
    finite = np.isfinite(dist)
    off_diag = ~np.eye(n, dtype=bool)
    reach = finite & off_diag
    max_dist = int(dist[reach].max()) if reach.any() else 0

    everyone = np.arange(n)
    # Warm sweep: one exact product per integer length up to 2M.
    warm_top = min(2 * g.M, max_dist)
    for d in range(2, warm_top + 1):
        target = np.where(dist == d, dist, np.inf)
        np.fill_diagonal(target, np.inf)
        if not np.isfinite(target).any():
            continue
        layer = _band_product(dist, W, d - 1, target, everyone)
        np.maximum(W, layer, out=W)

    rng = np.random.default_rng(seed)
    log_n = math.log(max(n, 2))
    r = warm_top
    while r < max_dist:
        r_next = min(max_dist, math.ceil(1.5 * r))
        band = reach & (dist > r) & (dist <= r_next)
        target = np.where(band, dist, np.inf)
        if not band.any():
            r = r_next
            continue
        p = min(1.0, c_H * g.M * log_n / r)
        for attempt in range(max_retries + 1):
            if p >= 1.0:
                bridges = everyone
            else:
                bridges = np.flatnonzero(rng.random(n) < p)
                if len(bridges) > 2 * p * n:
                    continue  # improbably dense sample, redraw
            got = _band_product(dist, W, r, target, bridges)
            if not (got[band] > _MISSING).all():
                p = min(1.0, 2 * p)
                continue
            if audit and len(bridges) < n:
                exact = _band_product(dist, W, r, target, everyone)
                if not (got[band] == exact[band]).all():
                    p = min(1.0, 2 * p)
                    continue
            np.maximum(W, got, out=W)
            break
        else:
            raise BottleneckBuildError(
                f"band ({r}, {r_next}] failed verification {max_retries} times")
        r = r_next

    if not (W[reach] > _MISSING).all():
        raise BottleneckBuildError("reachable pair left without a bottleneck arc")
    w_table = np.where(W > _MISSING, W, -1).astype(np.int64)
    return dist, w_table


class CanonicalApsp:
    """Distances, bottleneck arcs, canonical path trees, and the O(1)
    membership machinery built on top of them.

    Per root u the canonical paths to all targets form a tree (subpath
    consistency), stored as parent links plus the tree arc into each
    vertex.  ``next_out`` is the mirrored structure per target: the
    second vertex on the canonical u -> v path, which walks paths from
    the front.  Euler intervals per root turn "x lies on the canonical
    u -> v path" into two integer comparisons.
    """

    def __init__(self, g: Graph, dist: np.ndarray, w_table: np.ndarray):
        self.graph = g
        self.n = g.n
        self.M = g.M
        self.dist = dist
        self.w = w_table
        n = g.n
        arcs = g.arcs

        finite = np.isfinite(dist)
        order_u, order_v = np.nonzero(finite & ~np.eye(n, dtype=bool))
        by_len = np.argsort(dist[order_u, order_v], kind="stable")
        order_u, order_v = order_u[by_len], order_v[by_len]

        parent = np.full((n, n), -1, dtype=np.int32)
        parent_arc = np.full((n, n), -1, dtype=np.int64)
        next_vtx = np.full((n, n), -1, dtype=np.int32)
        next_arc = np.full((n, n), -1, dtype=np.int64)
        hop = np.full((n, n), -1, dtype=np.int32)
        np.fill_diagonal(hop, 0)
        wt = self.w
        for u, v in zip(order_u.tolist(), order_v.tolist()):
            e = wt[u, v]
            a, b, _ = arcs[e]
            if b == v:
                parent[u, v] = a
                parent_arc[u, v] = e
            else:
                parent[u, v] = parent[b, v]
                parent_arc[u, v] = parent_arc[b, v]
            if a == u:
                next_vtx[u, v] = b
                next_arc[u, v] = e
            else:
                next_vtx[u, v] = next_vtx[u, a]
                next_arc[u, v] = next_arc[u, a]
            hop[u, v] = hop[u, parent[u, v]] + 1
        self.parent = parent
        self.parent_arc = parent_arc
        self.next_vtx = next_vtx
        self.next_arc = next_arc
        self.hop = hop

        tin = np.full((n, n), -1, dtype=np.int32)
        tout = np.full((n, n), -1, dtype=np.int32)
        for u in range(n):
            kids: list[list[int]] = [[] for _ in range(n)]
            prow = parent[u]
            for v in range(n):
                p = prow[v]
                if p >= 0:
                    kids[p].append(v)  # ascending v keeps child order stable
            t = 0
            trow, orow = tin[u], tout[u]
            stack = [(u, 0)]
            trow[u] = t
            t += 1
            while stack:
                x, i = stack.pop()
                ks = kids[x]
                if i < len(ks):
                    stack.append((x, i + 1))
                    c = ks[i]
                    trow[c] = t
                    t += 1
                    stack.append((c, 0))
                else:
                    orow[x] = t
                    t += 1
        self.tin = tin
        self.tout = tout

    # -- membership ----------------------------------------------------------

    def vertex_on_path(self, u: int, v: int, x: int) -> bool:
        """Is x a vertex of the canonical u -> v path (endpoints count)?"""
        if not np.isfinite(self.dist[u, v]):
            return False
        tu = self.tin[u]
        tx = tu[x]
        return tx >= 0 and tx <= tu[v] <= self.tout[u, x]

    def edge_on_path(self, u: int, v: int, e: int) -> bool:
        """Is arc e (either orientation when undirected) on the canonical
        u -> v path?"""
        if not np.isfinite(self.dist[u, v]):
            return False
        candidates = (e,) if self.graph.directed else (e & ~1, e | 1)
        for c in candidates:
            b = self.graph.arcs[c][1]
            if self.parent_arc[u, b] == c and self.vertex_on_path(u, v, b):
                return True
        return False

    def path(self, u: int, v: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Reconstruct the canonical path as (vertices, arc ids)."""
        if not np.isfinite(self.dist[u, v]):
            raise ValueError(f"no path {u} -> {v}")
        verts = [v]
        arcs_out = []
        x = v
        while x != u:
            arcs_out.append(int(self.parent_arc[u, x]))
            x = int(self.parent[u, x])
            verts.append(x)
        return tuple(reversed(verts)), tuple(reversed(arcs_out))


def build_canonical_apsp(g: Graph, c_H: float = 3.0, seed: int = 0,
                         audit: bool = True) -> CanonicalApsp:
    dist, w_table = compute_bottleneck_table(g, c_H=c_H, seed=seed, audit=audit)
    apsp = CanonicalApsp(g, dist, w_table)
    _check_tables(g, apsp)
    return apsp


def _check_tables(g: Graph, apsp: CanonicalApsp) -> None:
    """Cheap internal consistency: every bottleneck arc must sit on some
    shortest path of its pair, and tree arcs must match distances."""
    dist = apsp.dist
    for u in range(g.n):
        du = dist[u]
        for v in range(g.n):
            if u == v or not np.isfinite(du[v]):
                continue
            a, b, wt = g.arcs[apsp.w[u, v]]
            if du[a] + wt + dist[b, v] != du[v]:
                raise BottleneckBuildError(
                    f"bottleneck arc of ({u}, {v}) is off every shortest path")
            p = apsp.parent[u, v]
            pa, pb, pw = g.arcs[apsp.parent_arc[u, v]]
            if pa != p or pb != v or du[p] + pw != du[v]:
                raise BottleneckBuildError(f"broken tree arc into {v} from root {u}")
