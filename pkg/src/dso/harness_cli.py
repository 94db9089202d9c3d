"""Command-line front end: generate graphs, build oracles, query, verify, bench.

Reports are line-oriented ``key=value`` text (stable key order, deterministic
under a fixed seed apart from wall-times) with an optional JSON copy.  Exit
codes: 0 success, 1 verification mismatch, 2 input error, 3 build failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time

import numpy as np

from .apsp_tiebreak import BottleneckBuildError
from .baseline_oracle import brute_distance
from .extend_dso import ExtendBuildError
from .fast_dso import FastBuildError
from .graph_core import (Failure, Graph, GraphFormatError, UNREACHABLE,
                         dump_graph, is_unreachable, load_graph)
from .pipeline import DsoConfig, FullDso, build_full_dso
from .sampled_dso import SampledBuildError

_BUILD_ERRORS = (SampledBuildError, ExtendBuildError, FastBuildError,
                 BottleneckBuildError)


def generate_graph(n: int, m: int, M: int = 1, directed: bool = True,
                   seed: int = 0) -> Graph:
    """Uniform random simple graph: m distinct vertex pairs, weights in 1..M."""
    if n < 1:
        raise ValueError("need at least one vertex")
    if M < 1:
        raise ValueError("weight range must be at least 1")
    cap = n * (n - 1) if directed else n * (n - 1) // 2
    if not 0 <= m <= cap:
        raise ValueError(f"m={m} infeasible: at most {cap} edges on {n} vertices")
    if directed:
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    else:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0x6E)))
    sel = rng.choice(cap, size=m, replace=False) if m else []
    weights = rng.integers(1, M + 1, size=m)
    edges = [(*pairs[int(k)], int(w)) for k, w in zip(sel, weights)]
    return Graph(n, edges, M=M, directed=directed)


class Report:
    """Ordered key=value lines, mirrored into JSON on request."""

    def __init__(self) -> None:
        self.items: list[tuple[str, object]] = []

    def add(self, key: str, value: object) -> None:
        self.items.append((key, value))

    def emit(self, json_path: str | None = None) -> None:
        for key, value in self.items:
            print(f"{key}={value}")
        if json_path:
            with open(json_path, "w") as fh:
                json.dump(dict(self.items), fh, indent=2, default=str)
                fh.write("\n")


def _config(args) -> DsoConfig:
    return DsoConfig(base_exponent=args.a, C=args.C, seed=args.seed,
                     threads=args.threads)


def _echo_config(rep: Report, g: Graph, cfg: DsoConfig) -> None:
    rep.add("n", g.n)
    rep.add("m", len(g.edges))
    rep.add("M", g.M)
    rep.add("directed", int(g.directed))
    rep.add("seed", cfg.seed)
    rep.add("C", cfg.C)
    rep.add("a", cfg.base_exponent)


def _stage_lines(rep: Report, dso: FullDso) -> None:
    for i, st in enumerate(dso.stages, 1):
        for key, value in st.items():
            rep.add(f"stage.{i}.{key}", value)


def _histogram(counts: list[int]) -> str:
    hist: dict[int, int] = {}
    for c in counts:
        hist[c] = hist.get(c, 0) + 1
    return ",".join(f"{k}:{v}" for k, v in sorted(hist.items()))


# -- subcommands ------------------------------------------------------------------


def cmd_gen(args) -> int:
    g = generate_graph(args.n, args.m, args.M,
                       directed=not args.undirected, seed=args.seed)
    text = dump_graph(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load(path: str) -> Graph:
    with open(path) as fh:
        return load_graph(fh.read())


def cmd_build(args) -> int:
    g = _load(args.graph)
    cfg = _config(args)
    rep = Report()
    rep.add("command", "build")
    _echo_config(rep, g, cfg)
    t0 = time.perf_counter()
    dso = build_full_dso(g, cfg)
    rep.add("build.seconds", round(time.perf_counter() - t0, 3))
    rep.add("radius", dso.oracle.radius)
    rep.add("unreachable_cut", dso.unreachable_cut)
    _stage_lines(rep, dso)
    if args.out:
        blob = dso.to_bytes()
        with open(args.out, "wb") as fh:
            fh.write(blob)
        rep.add("out", args.out)
        rep.add("out.bytes", len(blob))
    rep.emit(args.json)
    return 0


def _parse_failure(spec: str) -> Failure:
    kind, _, num = spec.partition(":")
    if kind not in ("vertex", "edge") or not num.isdigit():
        raise ValueError(f"failure must be vertex:<id> or edge:<id>, got {spec!r}")
    return Failure(kind, int(num))


def cmd_query(args) -> int:
    with open(args.oracle, "rb") as fh:
        dso = FullDso.from_bytes(fh.read())
    val = dso.query(args.u, args.v, _parse_failure(args.failure))
    rep = Report()
    rep.add("command", "query")
    rep.add("u", args.u)
    rep.add("v", args.v)
    rep.add("failure", args.failure)
    rep.add("distance", "unreachable" if is_unreachable(val) else int(val))
    rep.add("lookups", dso.oracle.last_lookup_count)
    rep.emit(args.json)
    return 0


def _all_failures(g: Graph) -> list[Failure]:
    return list(g.vertex_failures()) + list(g.edge_failures())


def _sample_triple(g: Graph, rng, fails: list[Failure]):
    while True:
        u = int(rng.integers(g.n))
        v = int(rng.integers(g.n))
        f = fails[int(rng.integers(len(fails)))]
        if u == v:
            continue
        if f.kind == "vertex" and (f.id == u or f.id == v):
            continue
        return u, v, f


def cmd_verify(args) -> int:
    g = _load(args.graph)
    cfg = _config(args)
    rep = Report()
    rep.add("command", "verify")
    _echo_config(rep, g, cfg)
    t0 = time.perf_counter()
    dso = build_full_dso(g, cfg)
    rep.add("build.seconds", round(time.perf_counter() - t0, 3))
    if args.corrupt_table:
        _corrupt(dso)
        rep.add("corrupted", 1)
    fails = _all_failures(g)
    n, m = g.n, len(g.edges)
    exhaustive = n ** 3 + n * n * m <= args.budget
    rep.add("mode", "exhaustive" if exhaustive else "sampled")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(cfg.seed, 0xCE)))
    mismatches = 0
    checked = 0
    lookups: list[int] = []
    if exhaustive:
        triples = ((u, v, f) for u in range(n) for v in range(n) if u != v
                   for f in fails
                   if not (f.kind == "vertex" and f.id in (u, v)))
    else:
        triples = (_sample_triple(g, rng, fails) for _ in range(args.budget))
    for u, v, f in triples:
        want = brute_distance(g, u, v, f)
        got = dso.query(u, v, f)
        lookups.append(dso.oracle.last_lookup_count)
        checked += 1
        if got != want:
            mismatches += 1
    rep.add("queries", checked)
    rep.add("mismatches", mismatches)
    rep.add("lookup.histogram", _histogram(lookups))
    _stage_lines(rep, dso)
    rep.emit(args.json)
    return 1 if mismatches else 0


def _corrupt(dso: FullDso) -> None:
    """Self-test hook: shift every finite off-diagonal distance so the
    verifier must report mismatches."""
    o = dso.oracle
    n = o._n
    for i, d in enumerate(o._dist):
        if d != UNREACHABLE and i // n != i % n:
            o._dist[i] = d + 1


def _bench_queries(g: Graph, dso: FullDso, q: int, rng) -> list[tuple[int, int, Failure]]:
    """Half uniform valid triples, half failures on the queried pair's
    canonical path (the interesting case for lookup counts)."""
    fails = _all_failures(g)
    o = dso.oracle
    n = g.n
    out = []
    for i in range(q):
        if i % 2 == 0:
            out.append(_sample_triple(g, rng, fails))
            continue
        for _ in range(64):
            u = int(rng.integers(n))
            v = int(rng.integers(n))
            if u == v or o._dist[u * n + v] == UNREACHABLE:
                continue
            arcs = []
            x = v
            while x != u:
                arc = o._parc[u * n + x]
                arcs.append(arc)
                x = o._tails[arc]
            verts = [o._tails[a] for a in arcs[:-1]]  # interior vertices
            pool: list[Failure] = [Failure("edge", g.canonical_edge_id(a)) for a in arcs]
            pool += [Failure("vertex", x) for x in verts]
            out.append((u, v, pool[int(rng.integers(len(pool)))]))
            break
        else:
            out.append(_sample_triple(g, rng, fails))
    return out


def cmd_bench(args) -> int:
    g = _load(args.graph)
    cfg = _config(args)
    rep = Report()
    rep.add("command", "bench")
    _echo_config(rep, g, cfg)
    t0 = time.perf_counter()
    dso = build_full_dso(g, cfg)
    rep.add("build.seconds", round(time.perf_counter() - t0, 3))
    _stage_lines(rep, dso)
    inner_total = sum(st.get("inner_queries", 0) for st in dso.stages)
    rep.add("build.inner_queries", inner_total)
    rep.add("queries", args.q)
    if args.q > 0:
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(cfg.seed, 0xBE)))
        triples = _bench_queries(g, dso, args.q, rng)
        lookups = []
        t0 = time.perf_counter()
        for u, v, f in triples:
            dso.query(u, v, f)
            lookups.append(dso.oracle.last_lookup_count)
        span = time.perf_counter() - t0
        rep.add("query.mean_lookups", round(statistics.mean(lookups), 3))
        rep.add("query.median_lookups", statistics.median(lookups))
        rep.add("query.max_lookups", max(lookups))
        rep.add("query.mean_micros", round(1e6 * span / args.q, 2))
        rep.add("lookup.histogram", _histogram(lookups))
    rep.emit(args.json)
    return 0


# -- argument plumbing --------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    env_seed = os.environ.get("DSO_SEED")
    p.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0,
                   help="random seed (falls back to DSO_SEED, then 0)")
    p.add_argument("--C", type=float, default=4.0,
                   help="oversampling constant shared by all stages")
    p.add_argument("--a", type=float, default=0.276724,
                   help="base radius exponent: r0 = ceil(n^a)")
    p.add_argument("--threads", type=int, default=None,
                   help="cap numeric library threads during builds")
    p.add_argument("--json", default=None, help="also write the report as JSON")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dso",
                                 description="distance sensitivity oracles")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random graph file")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--M", type=int, default=1, help="max edge weight")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build an oracle from a graph file")
    p.add_argument("graph")
    p.add_argument("--out", default=None, help="write the serialized oracle here")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="query a serialized oracle")
    p.add_argument("oracle")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.add_argument("failure", help="vertex:<id> or edge:<id>")
    _add_common(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="compare a full build against brute force")
    p.add_argument("graph")
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="exhaustive when n^3 + n^2 m fits, else this many samples")
    p.add_argument("--corrupt-table", action="store_true", dest="corrupt_table",
                   help=argparse.SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="build and query timing report")
    p.add_argument("graph")
    p.add_argument("--q", type=int, default=10_000, help="number of timed queries")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _BUILD_ERRORS as e:
        print(f"build-error={e}", file=sys.stderr)
        return 3
    except (GraphFormatError, ValueError, OSError) as e:
        print(f"error={e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
