"""Weighted digraphs with an explicit total edge order, plus failures.

Every structure downstream of this module leans on two conventions fixed
here:

* Arcs are numbered by position: arc ``i`` precedes arc ``j`` whenever
  ``i < j``.  That order breaks ties between equal-length shortest paths
  everywhere in the package, so it must survive subgraph views and file
  round-trips unchanged.
* An undirected edge is stored as two opposite arcs with consecutive ids
  ``2k`` and ``2k+1``; the pair lives and dies together.  Either id names
  the same failure and is normalized to the even one.

Weights are integers in ``{1..M}``.  Unreachability is the dedicated value
:data:`UNREACHABLE` (``math.inf``), never a large finite sentinel.
"""

from __future__ import annotations

import math
from typing import Iterator, NamedTuple

import numpy as np

UNREACHABLE = math.inf

# A finite number of weight-M edges can never reach this, so a value >= n*M
# inside a capped table always means "no path".
PathLength = float  # finite nonnegative int, or UNREACHABLE


def is_unreachable(x: PathLength) -> bool:
    return x == UNREACHABLE


class Failure(NamedTuple):
    """A single failed component: ``kind`` is ``"vertex"`` or ``"edge"``."""

    kind: str
    id: int


def vertex_failure(v: int) -> Failure:
    return Failure("vertex", v)


def edge_failure(e: int) -> Failure:
    return Failure("edge", e)


class GraphFormatError(ValueError):
    """Raised on malformed graph text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Graph:
    """Immutable weighted graph over vertices ``0..n-1``.

    ``edges`` is the input edge list (one entry per file line).  For a
    directed graph the arc list is the edge list; for an undirected graph
    each input edge (a, b, w) expands to arcs ``2k=(a,b,w)`` and
    ``2k+1=(b,a,w)``.  Parallel edges are allowed, self-loops are not.
    """

    __slots__ = (
        "n",
        "M",
        "directed",
        "edges",
        "arcs",
        "out_adj",
        "in_adj",
    )

    def __init__(self, n: int, edges: list[tuple[int, int, int]], M: int,
                 directed: bool = True):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        if M < 1:
            raise ValueError("M must be a positive integer")
        for idx, (a, b, w) in enumerate(edges):
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {idx}: endpoint out of range")
            if a == b:
                raise ValueError(f"edge {idx}: self-loops are not allowed")
            if not (1 <= w <= M):
                raise ValueError(f"edge {idx}: weight {w} outside 1..{M}")
        self.n = n
        self.M = M
        self.directed = directed
        self.edges = tuple((int(a), int(b), int(w)) for a, b, w in edges)
        if directed:
            self.arcs = self.edges
        else:
            arcs = []
            for a, b, w in self.edges:
                arcs.append((a, b, w))
                arcs.append((b, a, w))
            self.arcs = tuple(arcs)
        out_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        in_adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for idx, (a, b, w) in enumerate(self.arcs):
            out_adj[a].append((b, w, idx))
            in_adj[b].append((a, w, idx))
        self.out_adj = tuple(tuple(row) for row in out_adj)
        self.in_adj = tuple(tuple(row) for row in in_adj)

    # -- failure id helpers -------------------------------------------------

    def canonical_edge_id(self, e: int) -> int:
        """Map either orientation of an undirected edge to one id."""
        if not (0 <= e < len(self.arcs)):
            raise ValueError(f"edge id {e} out of range")
        return e if self.directed else e & ~1

    def arc_mate(self, e: int) -> int | None:
        """The opposite arc of an undirected edge, None for directed."""
        if self.directed:
            return None
        return e ^ 1

    def check_failure(self, f: Failure) -> Failure:
        """Validate a failure and return it in canonical form."""
        if f.kind == "vertex":
            if not (0 <= f.id < self.n):
                raise ValueError(f"vertex id {f.id} out of range")
            return f
        if f.kind == "edge":
            return Failure("edge", self.canonical_edge_id(f.id))
        raise ValueError(f"unknown failure kind {f.kind!r}")

    def vertex_failures(self) -> Iterator[Failure]:
        for v in range(self.n):
            yield Failure("vertex", v)

    def edge_failures(self) -> Iterator[Failure]:
        """One failure per edge (canonical arc ids only)."""
        step = 1 if self.directed else 2
        for e in range(0, len(self.arcs), step):
            yield Failure("edge", e)

    # -- views and matrices -------------------------------------------------

    def remove_failure(self, f: Failure) -> "FailureView":
        return FailureView(self, self.check_failure(f))

    def view(self) -> "FailureView":
        """The whole graph as a view (no failure)."""
        return FailureView(self, None)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Graph)
                and self.n == other.n and self.M == other.M
                and self.directed == other.directed
                and self.edges == other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.M, self.directed, self.edges))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, edges={len(self.edges)}, M={self.M}, {kind})"


class FailureView:
    """A graph minus one failed vertex or edge.

    Surviving arcs keep their original ids, so the tie-breaking order is
    inherited.  Construction is O(n + m); adjacency is materialized once.
    """

    __slots__ = ("base", "failure", "n", "M", "out_adj", "_dead_vertex")

    def __init__(self, base: Graph, failure: Failure | None):
        self.base = base
        self.failure = failure
        self.n = base.n
        self.M = base.M
        dead_v = -1
        dead_arcs: tuple[int, ...] = ()
        if failure is not None:
            if failure.kind == "vertex":
                dead_v = failure.id
            else:
                mate = base.arc_mate(failure.id)
                dead_arcs = (failure.id,) if mate is None else (failure.id, mate)
        self._dead_vertex = dead_v
        if failure is None:
            self.out_adj = base.out_adj
        else:
            rows = []
            for x in range(base.n):
                if x == dead_v:
                    rows.append(())
                    continue
                rows.append(tuple(
                    (h, w, idx) for (h, w, idx) in base.out_adj[x]
                    if h != dead_v and idx not in dead_arcs))
            self.out_adj = tuple(rows)

    def vertex_alive(self, v: int) -> bool:
        return v != self._dead_vertex

    def surviving_arc_ids(self) -> list[int]:
        return sorted(idx for row in self.out_adj for (_, _, idx) in row)

    def dense_matrix(self) -> np.ndarray:
        """One-hop min-plus matrix: 0 diagonal, min parallel weight, inf."""
        n = self.n
        d = np.full((n, n), np.inf)
        np.fill_diagonal(d, 0.0)
        for x in range(n):
            for (h, w, _) in self.out_adj[x]:
                if w < d[x, h]:
                    d[x, h] = w
        if self._dead_vertex >= 0:
            d[self._dead_vertex, self._dead_vertex] = np.inf
        return d


# -- text format -------------------------------------------------------------

def dump_graph(g: Graph) -> str:
    """Serialize to the line format ``n m M d|u`` / ``tail head weight``."""
    tag = "d" if g.directed else "u"
    out = [f"{g.n} {len(g.edges)} {g.M} {tag}\n"]
    for a, b, w in g.edges:
        out.append(f"{a} {b} {w}\n")
    return "".join(out)


def load_graph(text: str) -> Graph:
    """Parse :func:`dump_graph` output; raises GraphFormatError with the
    offending line number on malformed input."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError(1, "empty input")
    head = lines[0].split()
    if len(head) != 4:
        raise GraphFormatError(1, "header must be 'n m M d|u'")
    try:
        n, m, M = int(head[0]), int(head[1]), int(head[2])
    except ValueError:
        raise GraphFormatError(1, "header fields n, m, M must be integers")
    if head[3] not in ("d", "u"):
        raise GraphFormatError(1, f"direction tag must be 'd' or 'u', got {head[3]!r}")
    if n < 1:
        raise GraphFormatError(1, "n must be at least 1")
    if m < 0:
        raise GraphFormatError(1, "m must be nonnegative")
    if M < 1:
        raise GraphFormatError(1, "M must be at least 1")
    if len(lines) - 1 < m:
        raise GraphFormatError(len(lines) + 1, f"expected {m} edge lines, found {len(lines) - 1}")
    if len(lines) - 1 > m:
        raise GraphFormatError(m + 2, "unexpected extra line (duplicate header?)")
    edges = []
    for i in range(m):
        line_no = i + 2
        parts = lines[i + 1].split()
        if len(parts) != 3:
            raise GraphFormatError(line_no, "edge line must be 'tail head weight'")
        try:
            a, b, w = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise GraphFormatError(line_no, "edge fields must be integers")
        if not (0 <= a < n):
            raise GraphFormatError(line_no, f"tail {a} out of range 0..{n - 1}")
        if not (0 <= b < n):
            raise GraphFormatError(line_no, f"head {b} out of range 0..{n - 1}")
        if a == b:
            raise GraphFormatError(line_no, "self-loops are not allowed")
        if not (1 <= w <= M):
            raise GraphFormatError(line_no, f"weight {w} outside 1..{M}")
        edges.append((a, b, w))
    return Graph(n, edges, M, directed=(head[3] == "d"))


# -- canonical test fixtures --------------------------------------------------

def fixture_a() -> Graph:
    """Four vertices, one weight-5 shortcut; exercises bottleneck ties."""
    edges = [
        (0, 1, 1),
        (1, 2, 1),
        (2, 3, 1),
        (0, 2, 2),
        (0, 3, 5),
        (1, 3, 3),
    ]
    return Graph(4, edges, M=5, directed=True)


def fixture_b() -> Graph:
    """Five-vertex chain with a weight-2 bypass of vertex 2."""
    edges = [
        (0, 1, 1),
        (1, 2, 1),
        (2, 3, 1),
        (3, 4, 1),
        (1, 3, 2),
    ]
    return Graph(5, edges, M=2, directed=True)
