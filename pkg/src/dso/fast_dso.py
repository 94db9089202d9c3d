"""Constant-lookup failure queries on top of any truncated oracle.

The transformation precomputes, for every ordered pair, answers for the
failures that are hard to dodge at query time, and exploits structure for
the rest:

* a failure off the canonical path does not change the answer;
* random vertex priorities (halving tail: priority k with probability
  2^-k) mark O(log n) "key" vertices per path: the first and the last
  vertex of each priority level;
* failures near a path endpoint are covered by stored prefix/suffix
  answers whose depth budget grows as 2^(priority of the endpoint), so
  the gap between consecutive keys always fits the budget of both keys;
* a failure strictly between two consecutive keys is answered by a
  three-way minimum: detour through the right key, detour through the
  left key, or a single stored value covering "the replacement dodges
  the whole inter-key segment" (the maximum avoidance value over the
  segment, found at build time by a halving search over a range-max
  index of suffix answers).

Priorities are resampled until three checkable facts hold outright: the
maximum priority is small, each level's population is near expectation,
and every inter-key hop gap sits within budget.  After that, every query
is a fixed, instrumented number of array reads.

The build issues all its questions to the inner oracle in batches
(counted, and proportional to n^2 up to log factors); afterwards the
inner oracle is no longer consulted, so the finished structure answers
from its own tables alone.
"""

from __future__ import annotations

import math

import numpy as np

from .apsp_tiebreak import CanonicalApsp
from .graph_core import Failure

_INF = float("inf")


class FastBuildError(RuntimeError):
    pass


def _budget(C: float, priority: int, n: int) -> int:
    """Stored-entry depth for a priority: floor(C * 2^priority * log2 n)."""
    return int(C * (1 << priority) * math.log2(max(n, 2)))


# -- priorities and key chains -------------------------------------------------


class PriorityContext:
    """Vertex priorities plus first/last-of-level tables per pair.

    ``first_at[u, v, c]`` is the first vertex on the canonical u -> v path
    with priority >= c (-1 if none), ``last_at`` the last, and ``top[u, v]``
    the maximum priority on the path.  The keys of a pair are the first/
    last vertices of every level, and a vertex x is a key of (u, v) exactly
    when ``first_at[u, v, priority(x)] == x`` or the same for ``last_at``
    (a first-of-its-own-level vertex is first for every level down to the
    next stronger vertex, so the test needs only x's own level).

    Built once per graph; every radius stage shares it.
    """

    def __init__(self, apsp: CanonicalApsp, priorities: np.ndarray, C: float):
        self.apsp = apsp
        self.priorities = priorities
        self.C = C
        n = apsp.n
        c_max = int(priorities.max()) if n else 1
        self.c_max = c_max
        L = c_max + 1
        first_at = np.full((n, n, L), -1, dtype=np.int32)
        last_at = np.full((n, n, L), -1, dtype=np.int32)
        top = np.zeros((n, n), dtype=np.int32)
        prio = priorities
        levels = np.arange(L)
        parent = apsp.parent
        tin = apsp.tin
        for u in range(n):
            row_order = np.argsort(tin[u], kind="stable")
            cu = int(prio[u])
            first_at[u, u, 1:cu + 1] = u
            last_at[u, u, 1:cu + 1] = u
            top[u, u] = cu
            for v in row_order.tolist():
                if tin[u, v] < 0 or v == u:
                    continue
                p = parent[u, v]
                cv = int(prio[v])
                fa = first_at[u, p].copy()
                fa[(fa < 0) & (levels <= cv) & (levels > 0)] = v
                first_at[u, v] = fa
                la = last_at[u, p].copy()
                la[1:cv + 1] = v
                last_at[u, v] = la
                top[u, v] = max(top[u, p], cv)
        self.first_at = first_at
        self.last_at = last_at
        self.top = top

    def is_key(self, u: int, v: int, x: int) -> bool:
        c = int(self.priorities[x])
        if c > self.c_max:
            return False
        return bool(self.first_at[u, v, c] == x or self.last_at[u, v, c] == x)

    def keys_of(self, u: int, v: int) -> list[int]:
        """Key chain in path order, duplicates collapsed."""
        if u == v:
            return [u]
        if not np.isfinite(self.apsp.dist[u, v]):
            return []
        t = int(self.top[u, v])
        chain = [int(self.first_at[u, v, c]) for c in range(1, t + 1)]
        chain += [int(self.last_at[u, v, c]) for c in range(t, 0, -1)]
        out = [chain[0]]
        for k in chain[1:]:
            if k != out[-1]:
                out.append(k)
        return out


def assign_priorities(apsp: CanonicalApsp, C: float = 4.0, seed: int = 0,
                      max_retries: int = 64) -> PriorityContext:
    """Sample priorities and accept only assignments whose structural
    facts hold outright; resample otherwise."""
    n = apsp.n
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0xFA)))
    log2n = math.log2(max(n, 2))
    reasons = []
    for _ in range(max_retries):
        prio = rng.geometric(0.5, size=n).astype(np.int64)
        c_cap = int(2 * log2n) + 2
        if prio.max(initial=1) > c_cap:
            reasons.append("max priority")
            continue
        ok = True
        for c in range(1, int(prio.max(initial=1)) + 1):
            if (prio == c).sum() > 2 * n / (1 << c) + 4 * C * math.log(max(n, 2)):
                reasons.append(f"population of level {c}")
                ok = False
                break
        if not ok:
            continue
        ctx = PriorityContext(apsp, prio, C)
        if _gap_condition_holds(ctx):
            return ctx
        reasons.append("inter-key hop gap")
    raise FastBuildError(
        f"priority acceptance failed {max_retries} times; last failure: {reasons[-1]}")


def _gap_condition_holds(ctx: PriorityContext) -> bool:
    """Every consecutive key pair (over all path pairs) must have hop gap
    <= C * 2^min(priorities) * log2 n."""
    apsp, prio = ctx.apsp, ctx.priorities
    n = apsp.n
    if n < 2:
        return True
    hop = apsp.hop
    rows = np.arange(n)[:, None]
    lim = ctx.C * math.log2(n)
    reach = np.isfinite(apsp.dist) & (hop > 0)

    def hops_from_u(keys):  # hop[u, keys[u, v]] with -1 keys masked later
        return hop[rows, np.clip(keys, 0, None)]

    def gap_ok(left, right, valid):
        if not valid.any():
            return True
        g = hops_from_u(right) - hops_from_u(left)
        cmin = np.minimum(prio[np.clip(left, 0, None)], prio[np.clip(right, 0, None)])
        bound = lim * (1 << cmin.astype(np.int64))
        return bool((g[valid] <= bound[valid]).all())

    first_at, last_at, top = ctx.first_at, ctx.last_at, ctx.top
    for c in range(1, ctx.c_max + 1):
        # rising chain: first-of-level-c to first-of-level-(c+1)
        if c < ctx.c_max:
            valid = reach & (first_at[:, :, c] >= 0) & (first_at[:, :, c + 1] >= 0) & (top > c)
            if not gap_ok(first_at[:, :, c], first_at[:, :, c + 1], valid):
                return False
            valid = reach & (last_at[:, :, c] >= 0) & (last_at[:, :, c + 1] >= 0) & (top > c)
            if not gap_ok(last_at[:, :, c + 1], last_at[:, :, c], valid):
                return False
        # crossing at the top level
        valid = reach & (top == c)
        if not gap_ok(first_at[:, :, c], last_at[:, :, c], valid):
            return False
    return True


# -- the oracle ----------------------------------------------------------------


class FastOracle:
    """Truncated oracle with a fixed number of array reads per query.

    Shares the priority context across stages; the per-stage tables are
    rebuilt because their values depend on the inner oracle's radius.
    """

    def __init__(self, inner, apsp: CanonicalApsp, ctx: PriorityContext,
                 C: float = 4.0):
        self.inner = inner
        self.apsp = apsp
        self.ctx = ctx
        self.C = C
        self.radius = inner.radius
        self.graph = apsp.graph
        self.preprocess_count = 1
        self.query_count = 0
        self.total_lookups = 0
        self.last_lookup_count = 0
        start = inner.query_count
        self._layout()
        self._fill_endpoint_tables()
        self._build_rmq()
        self._fill_segment_tables()
        self.build_inner_queries = inner.query_count - start
        self._mirror()

    # -- table layout ---------------------------------------------------------

    def _layout(self) -> None:
        apsp, ctx = self.apsp, self.ctx
        n = apsp.n
        prio = ctx.priorities
        budget_of = np.array([_budget(self.C, c, n) for c in range(ctx.c_max + 1)],
                             dtype=np.int64)
        hop = np.maximum(apsp.hop, 0).astype(np.int64)
        pref_len = np.minimum(budget_of[prio][:, None], hop)
        suf_len = np.minimum(budget_of[prio][None, :], hop)
        self._pref_len = pref_len
        self._suf_len = suf_len
        self.pref_off = np.zeros(n * n + 1, dtype=np.int64)
        np.cumsum(pref_len.ravel(), out=self.pref_off[1:])
        self.suf_off = np.zeros(n * n + 1, dtype=np.int64)
        np.cumsum(suf_len.ravel(), out=self.suf_off[1:])
        self.pref_vertex = np.zeros(self.pref_off[-1])
        self.pref_edge = np.zeros(self.pref_off[-1])
        self.suf_vertex = np.zeros(self.suf_off[-1])
        self.suf_edge = np.zeros(self.suf_off[-1])
        L = ctx.c_max + 1
        self.seg_max = np.zeros((n, n, L, 2))    # inter-key segment maxima
        self.key_val = np.zeros((n, n, L, 2))    # per-key avoidance values

    def _walk(self, u: int):
        """DFS over the canonical out-tree of u, yielding (v, vertex path,
        arc path) with the paths shared and mutated in place."""
        apsp = self.apsp
        n = apsp.n
        kids: list[list[int]] = [[] for _ in range(n)]
        prow = apsp.parent[u]
        for v in range(n):
            if prow[v] >= 0:
                kids[prow[v]].append(v)
        path_v = [u]
        path_e: list[int] = []
        stack = [(u, 0)]
        while stack:
            x, i = stack.pop()
            ks = kids[x]
            if i == 0 and x != u:
                path_v.append(x)
                path_e.append(int(apsp.parent_arc[u, x]))
                yield x, path_v, path_e
            if i < len(ks):
                stack.append((x, i + 1))
                stack.append((ks[i], 0))
            elif x != u:
                path_v.pop()
                path_e.pop()

    def _fill_endpoint_tables(self) -> None:
        """Prefix/suffix avoidance answers per pair, one batch per root."""
        n = self.apsp.n
        pref_len, suf_len = self._pref_len, self._suf_len
        streams = (self.pref_vertex, self.pref_edge, self.suf_vertex, self.suf_edge)
        for u in range(n):
            tri: list[list[tuple[int, int, Failure]]] = [[], [], [], []]
            pos: list[list[int]] = [[], [], [], []]
            for v, path_v, path_e in self._walk(u):
                h = len(path_e)
                base = u * n + v
                po = int(self.pref_off[base])
                for j in range(int(pref_len[u, v])):
                    tri[0].append((u, v, Failure("vertex", path_v[j + 1])))
                    pos[0].append(po + j)
                    tri[1].append((u, v, Failure("edge", path_e[j])))
                    pos[1].append(po + j)
                so = int(self.suf_off[base])
                for i in range(1, int(suf_len[u, v]) + 1):
                    tri[2].append((u, v, Failure("vertex", path_v[h - i])))
                    pos[2].append(so + i - 1)
                    tri[3].append((u, v, Failure("edge", path_e[h - i])))
                    pos[3].append(so + i - 1)
            for s in range(4):
                if tri[s]:
                    streams[s][np.array(pos[s])] = self.inner.query_many(tri[s])

    # -- range-max index over suffix answers -----------------------------------

    def _build_rmq(self) -> None:
        """Sparse tables over each pair's suffix vertex answers (excluding
        the conventional entry at the far endpoint)."""
        n = self.apsp.n
        # min(budget, hop - 1): every stored suffix entry except the
        # conventional one at the near endpoint
        ell = np.minimum(self._suf_len, np.maximum(self.apsp.hop, 0) - 1)
        ell = np.maximum(ell, 0).astype(np.int64)
        # A table for length L has sum_{k<=log2 L} (L - 2^k + 1) slots.
        sizes = np.zeros(n * n, dtype=np.int64)
        flat_ell = ell.ravel()
        pos = flat_ell > 0
        ks = np.floor(np.log2(flat_ell[pos])).astype(np.int64)
        sizes[pos] = (ks + 1) * (flat_ell[pos] + 1) - ((1 << (ks + 1)) - 1)
        self.rmq_ell = flat_ell
        self.rmq_off = np.zeros(n * n + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.rmq_off[1:])
        self.rmq_val = np.zeros(self.rmq_off[-1])
        self.rmq_idx = np.zeros(self.rmq_off[-1], dtype=np.int32)
        for pair in np.flatnonzero(pos).tolist():
            L = int(flat_ell[pair])
            seq = self.suf_vertex[self.suf_off[pair]:self.suf_off[pair] + L]
            off = int(self.rmq_off[pair])
            vals = seq.copy()
            idxs = np.arange(L, dtype=np.int32)
            self.rmq_val[off:off + L] = vals
            self.rmq_idx[off:off + L] = idxs
            off += L
            half = 1
            while 2 * half <= L:
                m = L - 2 * half + 1
                left_wins = vals[:m] >= vals[half:half + m]
                vals = np.where(left_wins, vals[:m], vals[half:half + m])
                idxs = np.where(left_wins, idxs[:m], idxs[half:half + m])
                self.rmq_val[off:off + m] = vals
                self.rmq_idx[off:off + m] = idxs
                off += m
                half *= 2

    def _rmq_max(self, pair: int, lo: int, hi: int) -> tuple[float, int]:
        """(max value, lowest attaining 0-based index) over positions
        [lo, hi] of the pair's suffix sequence."""
        L = int(self.rmq_ell[pair])
        if not (0 <= lo <= hi < L):
            raise IndexError("range-max query outside stored sequence")
        k = (hi - lo + 1).bit_length() - 1
        off = int(self.rmq_off[pair]) + k * (L + 1) - ((1 << k) - 1)
        a, b = off + lo, off + hi - (1 << k) + 1
        va, vb = self.rmq_val[a], self.rmq_val[b]
        if va >= vb:
            return float(va), int(self.rmq_idx[a])
        return float(vb), int(self.rmq_idx[b])

    # -- the segment search -----------------------------------------------------

    def _suffix_val(self, pair_u: int, pair_v: int, back: int) -> float:
        off = self.suf_off[pair_u * self.apsp.n + pair_v]
        return float(self.suf_vertex[off + back - 1])

    def _prefix_val(self, pair_u: int, pair_v: int, fwd: int) -> float:
        off = self.pref_off[pair_u * self.apsp.n + pair_v]
        return float(self.pref_vertex[off + fwd - 1])

    def _h_value(self, u: int, v: int, s: int, t: int, y: int) -> float:
        """Upper proxy for the avoidance value at y in segment [s, t]:
        best of a detour through t and a detour through s, capped."""
        apsp, r = self.apsp, float(self.radius)
        if y == t:
            through_t = _INF
        else:
            through_t = self._suffix_val(u, t, int(apsp.hop[y, t])) + float(apsp.dist[t, v])
        if y == s:
            through_s = _INF
        else:
            through_s = float(apsp.dist[u, s]) + self._prefix_val(s, v, int(apsp.hop[s, y]))
        return min(through_t, through_s, r)

    def find_max_avoider(self, u: int, v: int, s: int, t: int,
                         path: tuple[int, ...] | None = None) -> int:
        """A vertex of the closed path segment [s, t] whose avoidance value
        attains the segment maximum.

        Halving search: pick the suffix-index range-max witness of the left
        half; if its through-t detour is the binding term of its proxy, no
        left vertex can beat it and the search keeps the right half (the
        witness stays a candidate), otherwise the right half is dropped.
        Small leftovers are scanned directly.  Proxy ties resolve to the
        earliest path position.
        """
        apsp = self.apsp
        n = apsp.n
        if path is None:
            path = apsp.path(u, v)[0]
        js, jt = int(apsp.hop[u, s]), int(apsp.hop[u, t])
        if not (0 < js < jt < len(path) - 1):
            raise ValueError("segment endpoints must be interior to the path")
        pair_ut = u * n + t
        lo, hi = js, jt
        best_h, best_y, best_pos = -1.0, -1, -1
        while hi - lo > 4:
            mid = (lo + hi) // 2
            # positions [lo, mid] map to suffix indices [jt-mid, jt-lo] of (u, t)
            val_ut, sidx = self._rmq_max(pair_ut, jt - mid - 1, jt - lo - 1)
            ypos = jt - (sidx + 1)
            y = path[ypos]
            hy = self._h_value(u, v, s, t, y)
            if hy > best_h or (hy == best_h and ypos < best_pos):
                best_h, best_y, best_pos = hy, y, ypos
            if min(val_ut + float(apsp.dist[t, v]), float(self.radius)) == hy:
                lo = mid
            else:
                hi = mid
        for pos in range(lo, hi + 1):
            y = path[pos]
            hy = self._h_value(u, v, s, t, y)
            if hy > best_h or (hy == best_h and pos < best_pos):
                best_h, best_y, best_pos = hy, y, pos
        return best_y

    def _fill_segment_tables(self) -> None:
        """Per-key values and inter-key segment maxima, one batch per root."""
        apsp, ctx = self.apsp, self.ctx
        n = apsp.n
        prio = ctx.priorities
        for u in range(n):
            triples: list[tuple[int, int, Failure]] = []
            dests: list[tuple[int, int, int, int]] = []  # (table, v, level, side)
            for v, path_v, path_e in self._walk(u):
                ell = int(ctx.top[u, v])
                firsts = ctx.first_at[u, v]
                lasts = ctx.last_at[u, v]
                for c in range(1, ell + 1):
                    k = int(firsts[c])
                    if k != u and k != v and prio[k] == c:
                        triples.append((u, v, Failure("vertex", k)))
                        dests.append((1, v, c, 0))
                    k2 = int(lasts[c])
                    if k2 != u and k2 != v and prio[k2] == c and firsts[c] != k2:
                        triples.append((u, v, Failure("vertex", k2)))
                        dests.append((1, v, c, 1))
                segs = []
                for c in range(1, ell):
                    segs.append((int(firsts[c]), int(firsts[c + 1]), c, 0))
                    segs.append((int(lasts[c + 1]), int(lasts[c]), c, 1))
                segs.append((int(firsts[ell]), int(lasts[ell]), ell, 0))
                for s, t, c, side in segs:
                    if s == t or s == u or t == v:
                        continue  # degenerate or endpoint-adjacent: never read
                    y = self.find_max_avoider(u, v, s, t, tuple(path_v))
                    triples.append((u, v, Failure("vertex", y)))
                    dests.append((0, v, c, side))
            if not triples:
                continue
            vals = self.inner.query_many(triples)
            for (table, v, c, side), val in zip(dests, vals):
                if table == 0:
                    self.seg_max[u, v, c, side] = val
                else:
                    self.key_val[u, v, c, side] = val

    # -- query-time mirrors ------------------------------------------------------

    def _mirror(self) -> None:
        apsp, ctx = self.apsp, self.ctx
        self._n = apsp.n
        self._L = ctx.c_max + 1
        self._dist = apsp.dist.ravel().tolist()
        self._hop = apsp.hop.ravel().tolist()
        self._tin = apsp.tin.ravel().tolist()
        self._tout = apsp.tout.ravel().tolist()
        self._parc = apsp.parent_arc.ravel().tolist()
        self._first = ctx.first_at.reshape(-1).tolist()
        self._last = ctx.last_at.reshape(-1).tolist()
        self._top = ctx.top.ravel().tolist()
        self._prio = ctx.priorities.tolist()
        self._poff = self.pref_off.tolist()
        self._soff = self.suf_off.tolist()
        self._pv = self.pref_vertex.tolist()
        self._pe = self.pref_edge.tolist()
        self._sv = self.suf_vertex.tolist()
        self._se = self.suf_edge.tolist()
        self._tails = [a for (a, _, _) in self.graph.arcs]
        self._heads = [b for (_, b, _) in self.graph.arcs]
        self._segs = self.seg_max.ravel().tolist()
        self._keyv = self.key_val.ravel().tolist()

    def release_inner(self) -> None:
        """Drop the inner oracle once no later stage needs it; the finished
        tables answer alone."""
        self.inner = None

    # -- queries -------------------------------------------------------------------

    def query(self, u: int, v: int, f: Failure) -> float:
        self.query_count += 1
        n = self._n
        r = float(self.radius)
        lk = 0
        kind_vertex = f.kind == "vertex"
        fid = f.id
        if kind_vertex and (fid == u or fid == v):
            self.last_lookup_count = lk
            return r
        if u == v:
            self.last_lookup_count = lk
            return 0.0
        base = u * n + v
        d = self._dist[base]
        lk += 1
        if d == _INF:
            self.last_lookup_count = lk
            self.total_lookups += lk
            return r

        # on-path test; resolve the oriented arc for edge failures
        if kind_vertex:
            a = b = fid
            tx = self._tin[u * n + fid]
            lk += 3
            on = tx >= 0 and tx <= self._tin[base] <= self._tout[u * n + fid]
        else:
            on = False
            a = b = -1
            cands = (fid,) if self.graph.directed else (fid & ~1, fid | 1)
            for c in cands:
                head = self._heads[c]
                lk += 2
                if self._parc[u * n + head] == c:
                    tx = self._tin[u * n + head]
                    lk += 2
                    if tx >= 0 and tx <= self._tin[base] <= self._tout[u * n + head]:
                        a, b = self._tails[c], head
                        on = True
                        break
        if not on:
            self.last_lookup_count = lk
            self.total_lookups += lk
            return d if d < r else r

        L = self._L
        if kind_vertex:
            c = self._prio[fid]
            lk += 2
            if self._first[base * L + c] == fid:
                lk += 1
                out = self._keyv[base * L * 2 + c * 2 + 0]
                self.last_lookup_count = lk
                self.total_lookups += lk
                return out
            lk += 1
            if self._last[base * L + c] == fid:
                lk += 1
                out = self._keyv[base * L * 2 + c * 2 + 1]
                self.last_lookup_count = lk
                self.total_lookups += lk
                return out

        alpha = self._top[u * n + a]
        beta = self._top[b * n + v]
        ell = self._top[base]
        lk += 3
        if beta == ell:
            k_left = self._first[base * L + alpha]
        else:
            k_left = self._last[base * L + beta + 1]
        if alpha == ell:
            k_right = self._last[base * L + beta]
        else:
            k_right = self._first[base * L + alpha + 1]
        lk += 2

        if k_left == u:
            j = self._hop[u * n + b]
            off = self._poff[base]
            lk += 2
            out = self._pv[off + j - 1] if kind_vertex else self._pe[off + j - 1]
            lk += 1
            self.last_lookup_count = lk
            self.total_lookups += lk
            return out
        if k_right == v:
            i = self._hop[b * n + v] + (0 if kind_vertex else 1)
            off = self._soff[base]
            lk += 2
            out = self._sv[off + i - 1] if kind_vertex else self._se[off + i - 1]
            lk += 1
            self.last_lookup_count = lk
            self.total_lookups += lk
            return out

        # strictly between two interior keys: three-way minimum
        i = self._hop[b * n + k_right] + (0 if kind_vertex else 1)
        so = self._soff[u * n + k_right]
        through_right = (self._sv[so + i - 1] if kind_vertex else self._se[so + i - 1]) \
            + self._dist[k_right * n + v]
        lk += 4
        j = self._hop[k_left * n + b]
        po = self._poff[k_left * n + v]
        through_left = self._dist[u * n + k_left] \
            + (self._pv[po + j - 1] if kind_vertex else self._pe[po + j - 1])
        lk += 4
        if beta == ell:
            slot = (base * L + (ell if alpha == ell else alpha)) * 2
        else:
            slot = (base * L + beta) * 2 + 1
        dodge = self._segs[slot]
        lk += 1
        self.last_lookup_count = lk
        self.total_lookups += lk
        best = through_right
        if through_left < best:
            best = through_left
        if dodge < best:
            best = dodge
        return best if best < r else r

    def query_many(self, triples) -> list[float]:
        q = self.query
        return [q(u, v, f) for (u, v, f) in triples]

    # -- vectorized rows/columns (build-time helper for radius extension) --------

    def _resolve_arc_masks(self, fixed: int, f: Failure, by_row: bool):
        """On-path masks and per-lane (tail, head) for an edge failure.

        ``by_row``: the fixed endpoint is the source u (lanes = targets v);
        otherwise the fixed endpoint is the target v (lanes = sources u).
        """
        apsp = self.apsp
        n = self._n
        tin, tout, parc = apsp.tin, apsp.tout, apsp.parent_arc
        cands = (f.id,) if self.graph.directed else (f.id & ~1, f.id | 1)
        on = np.zeros(n, dtype=bool)
        a_vec = np.zeros(n, dtype=np.int64)
        b_vec = np.zeros(n, dtype=np.int64)
        for c in cands:
            ta, hb = self.graph.arcs[c][0], self.graph.arcs[c][1]
            if by_row:
                u = fixed
                if parc[u, hb] != c:
                    continue
                lane = (tin[u, hb] >= 0) & (tin[u, hb] <= tin[u]) & (tin[u] <= tout[u, hb])
            else:
                v = fixed
                lane = (parc[:, hb] == c) & (tin[:, hb] >= 0) \
                    & (tin[:, hb] <= tin[:, v]) & (tin[:, v] <= tout[:, hb])
            take = lane & ~on
            a_vec[take] = ta
            b_vec[take] = hb
            on |= lane
        return on, a_vec, b_vec

    def query_row(self, u: int, f: Failure):
        """query(u, v, f) for every v, as one vectorized pass.

        Matches the scalar query exactly, endpoint conventions included.
        Requires the live build structures; a deserialized oracle falls back
        to scalar queries.
        """
        n = self._n
        if self.apsp is None:
            return np.array([self.query(u, v, f) for v in range(n)])
        self.query_count += n
        apsp, ctx = self.apsp, self.ctx
        r = float(self.radius)
        if f.kind == "vertex" and f.id == u:
            return np.full(n, r)
        dist_row = apsp.dist[u]
        out = np.minimum(dist_row, r)

        if f.kind == "vertex":
            fid = f.id
            tf, tof = apsp.tin[u, fid], apsp.tout[u, fid]
            on = (tf >= 0) & (tf <= apsp.tin[u]) & (apsp.tin[u] <= tof)
            on[fid] = False
            a_vec = b_vec = np.full(n, fid)
        else:
            on, a_vec, b_vec = self._resolve_arc_masks(u, f, by_row=True)
        on &= np.isfinite(dist_row)
        on[u] = False
        if on.any():
            sub = np.flatnonzero(on)
            out[sub] = self._row_on_path(u, sub, a_vec[sub], b_vec[sub],
                                         f.kind == "vertex", f.id)
        out[u] = 0.0
        if f.kind == "vertex":
            out[f.id] = r
        return out

    def _row_on_path(self, u, vs, a_vec, b_vec, is_vertex, fid):
        apsp, ctx = self.apsp, self.ctx
        n, r = self._n, float(self.radius)
        first_u = ctx.first_at[u]          # (n, L)
        last_u = ctx.last_at[u]
        top = ctx.top
        out = np.empty(len(vs))
        out.fill(np.nan)
        done = np.zeros(len(vs), dtype=bool)

        if is_vertex:
            c = int(ctx.priorities[fid])
            k1 = first_u[vs, c] == fid
            k2 = ~k1 & (last_u[vs, c] == fid)
            out[k1] = self.key_val[u, vs[k1], c, 0]
            out[k2] = self.key_val[u, vs[k2], c, 1]
            done = k1 | k2

        alpha = top[u, a_vec]
        beta = top[b_vec, vs]
        ell = top[u, vs]
        b_eq = beta == ell
        k_left = np.where(b_eq, first_u[vs, alpha],
                          last_u[vs, np.minimum(beta + 1, ctx.c_max)])
        k_right = np.where(alpha == ell, last_u[vs, np.maximum(beta, 0)],
                           first_u[vs, np.minimum(alpha + 1, ctx.c_max)])

        edge_shift = 0 if is_vertex else 1
        pv = self.pref_vertex if is_vertex else self.pref_edge
        sv = self.suf_vertex if is_vertex else self.suf_edge

        pref = ~done & (k_left == u)
        if pref.any():
            w = vs[pref]
            j = apsp.hop[u, b_vec[pref]]
            out[pref] = pv[self.pref_off[u * n + w] + j - 1]
            done |= pref
        suf = ~done & (k_right == vs)
        if suf.any():
            w = vs[suf]
            i = apsp.hop[b_vec[suf], w] + edge_shift
            out[suf] = sv[self.suf_off[u * n + w] + i - 1]
            done |= suf
        mid = ~done
        if mid.any():
            w = vs[mid]
            kl = np.clip(k_left[mid], 0, n - 1)
            kr = np.clip(k_right[mid], 0, n - 1)
            bm, am = b_vec[mid], a_vec[mid]
            i2 = apsp.hop[bm, kr] + edge_shift
            t1 = sv[self.suf_off[u * n + kr] + i2 - 1] + apsp.dist[kr, w]
            j2 = apsp.hop[kl, bm]
            t2 = apsp.dist[u, kl] + pv[self.pref_off[kl * n + w] + j2 - 1]
            lvl = np.where(b_eq[mid], alpha[mid], beta[mid])
            side = np.where(b_eq[mid], 0, 1)
            t3 = self.seg_max[u, w, lvl, side]
            out[mid] = np.minimum(np.minimum(t1, t2), np.minimum(t3, r))
        return out

    def query_col(self, v: int, f: Failure):
        """query(u, v, f) for every u; the column analog of query_row."""
        n = self._n
        if self.apsp is None:
            return np.array([self.query(u, v, f) for u in range(n)])
        self.query_count += n
        apsp, ctx = self.apsp, self.ctx
        r = float(self.radius)
        if f.kind == "vertex" and f.id == v:
            return np.full(n, r)
        dist_col = apsp.dist[:, v]
        out = np.minimum(dist_col, r)

        if f.kind == "vertex":
            fid = f.id
            on = (apsp.tin[:, fid] >= 0) & (apsp.tin[:, fid] <= apsp.tin[:, v]) \
                & (apsp.tin[:, v] <= apsp.tout[:, fid])
            on[fid] = False
            a_vec = b_vec = np.full(n, fid)
        else:
            on, a_vec, b_vec = self._resolve_arc_masks(v, f, by_row=False)
        on &= np.isfinite(dist_col)
        on[v] = False
        if on.any():
            sub = np.flatnonzero(on)
            out[sub] = self._col_on_path(v, sub, a_vec[sub], b_vec[sub],
                                         f.kind == "vertex", f.id)
        out[v] = 0.0
        if f.kind == "vertex":
            out[f.id] = r
        return out

    def _col_on_path(self, v, us, a_vec, b_vec, is_vertex, fid):
        apsp, ctx = self.apsp, self.ctx
        n, r = self._n, float(self.radius)
        first_v = ctx.first_at[us, v]      # (k, L)
        last_v = ctx.last_at[us, v]
        top = ctx.top
        k = len(us)
        rows = np.arange(k)
        out = np.empty(k)
        out.fill(np.nan)
        done = np.zeros(k, dtype=bool)

        if is_vertex:
            c = int(ctx.priorities[fid])
            k1 = first_v[rows, c] == fid
            k2 = ~k1 & (last_v[rows, c] == fid)
            out[k1] = self.key_val[us[k1], v, c, 0]
            out[k2] = self.key_val[us[k2], v, c, 1]
            done = k1 | k2

        alpha = top[us, a_vec]
        beta = top[b_vec, v]
        ell = top[us, v]
        b_eq = beta == ell
        k_left = np.where(b_eq, first_v[rows, alpha],
                          last_v[rows, np.minimum(beta + 1, ctx.c_max)])
        k_right = np.where(alpha == ell, last_v[rows, np.maximum(beta, 0)],
                           first_v[rows, np.minimum(alpha + 1, ctx.c_max)])

        edge_shift = 0 if is_vertex else 1
        pv = self.pref_vertex if is_vertex else self.pref_edge
        sv = self.suf_vertex if is_vertex else self.suf_edge

        pref = ~done & (k_left == us)
        if pref.any():
            w = us[pref]
            j = apsp.hop[w, b_vec[pref]]
            out[pref] = pv[self.pref_off[w * n + v] + j - 1]
            done |= pref
        suf = ~done & (k_right == v)
        if suf.any():
            w = us[suf]
            i = apsp.hop[b_vec[suf], v] + edge_shift
            out[suf] = sv[self.suf_off[w * n + v] + i - 1]
            done |= suf
        mid = ~done
        if mid.any():
            w = us[mid]
            kl = np.clip(k_left[mid], 0, n - 1)
            kr = np.clip(k_right[mid], 0, n - 1)
            bm = b_vec[mid]
            i2 = apsp.hop[bm, kr] + edge_shift
            t1 = sv[self.suf_off[w * n + kr] + i2 - 1] + apsp.dist[kr, v]
            j2 = apsp.hop[kl, bm]
            t2 = apsp.dist[w, kl] + pv[self.pref_off[kl * n + v] + j2 - 1]
            lvl = np.where(b_eq[mid], alpha[mid], beta[mid])
            side = np.where(b_eq[mid], 0, 1)
            t3 = self.seg_max[w, v, lvl, side]
            out[mid] = np.minimum(np.minimum(t1, t2), np.minimum(t3, r))
        return out
