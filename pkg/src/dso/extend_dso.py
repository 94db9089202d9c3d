"""Radius growth: turn an r-truncated oracle into a ceil(3r/2)-truncated one.

A replacement path with length in [r, 3r/2) has a middle stretch of
vertices whose prefix and suffix are both strictly shorter than r, so
both legs are answerable by the inner oracle.  Sampling bridge vertices
at rate ~ 3*C*M*ln(n)/r hits that middle stretch with high probability
(it contains at least r/(3M) vertices, hence the r >= 3M precondition),
and the query takes the best two-leg sum over sampled bridges.

Leg values equal to r are caps, not distances, so the strict < r filter
from the defining formula is kept exactly.  Both endpoint conventions
compose for free: a bridge equal to the failed vertex gets leg value r
from the inner oracle and filters itself out.
"""

from __future__ import annotations

import math

import numpy as np

from .graph_core import Failure, Graph


class ExtendBuildError(RuntimeError):
    pass


class ExtendedOracle:
    def __init__(self, inner, g: Graph, C: float = 4.0, seed: int = 0,
                 max_retries: int = 8, dist=None):
        r = inner.radius
        if r < 3 * g.M:
            raise ValueError(f"inner radius {r} below 3M = {3 * g.M}")
        self.inner = inner
        self.graph = g
        self.inner_radius = r
        self.radius = math.ceil(1.5 * r)
        self.C = C
        # optional no-failure distances: any pair already at or past the new
        # cap answers with the cap, skipping the inner oracle and bridges
        self._dist = dist
        n = g.n
        p = min(1.0, 3.0 * C * g.M * math.log(max(n, 2)) / r)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0x0E)))
        if p >= 1.0:
            self.bridges = np.arange(n)
        else:
            for retry in range(max_retries):
                H = np.flatnonzero(rng.random(n) < p)
                if 1 <= len(H) <= 2 * p * n:
                    break
            else:
                raise ExtendBuildError("bridge sample size check failed repeatedly")
            self.bridges = H
        self.preprocess_count = 1
        self.query_count = 0

    def _bridge(self, u: int, v: int, f: Failure) -> float:
        """Best two-leg sum over bridges, capped at the new radius."""
        inner, r = self.inner, self.inner_radius
        row = getattr(inner, "query_row", None)
        if row is not None:
            su = inner.query_row(u, f)[self.bridges]
            sv = inner.query_col(v, f)[self.bridges]
            ok = (su < r) & (sv < r)
            best = (su[ok] + sv[ok]).min() if ok.any() else np.inf
            return float(min(best, self.radius))
        best = float(self.radius)
        for h in self.bridges.tolist():
            a = inner.query(u, h, f)
            if a >= r:
                continue
            b = inner.query(h, v, f)
            if b < r and a + b < best:
                best = a + b
        return best

    def query(self, u: int, v: int, f: Failure) -> float:
        self.query_count += 1
        f = self.graph.check_failure(f)
        if f.kind == "vertex" and (u == f.id or v == f.id):
            return float(self.radius)
        if u == v:
            return 0.0
        if self._dist is not None and self._dist[u, v] >= self.radius:
            return float(self.radius)
        a = self.inner.query(u, v, f)
        if a < self.inner_radius:
            return a
        return self._bridge(u, v, f)

    def query_many(self, triples) -> list[float]:
        triples = list(triples)
        self.query_count += len(triples)
        out = [0.0] * len(triples)
        ask_pos: list[int] = []
        ask: list[tuple[int, int, Failure]] = []
        for pos, (u, v, f) in enumerate(triples):
            f = self.graph.check_failure(f)
            if f.kind == "vertex" and (u == f.id or v == f.id):
                out[pos] = float(self.radius)
            elif u == v:
                out[pos] = 0.0
            elif self._dist is not None and self._dist[u, v] >= self.radius:
                out[pos] = float(self.radius)
            else:
                ask_pos.append(pos)
                ask.append((u, v, f))
        if ask:
            base = self.inner.query_many(ask)
            for pos, (u, v, f), a in zip(ask_pos, ask, base):
                out[pos] = a if a < self.inner_radius else self._bridge(u, v, f)
        return out
