import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dso.baseline_oracle import (
    BruteTruncatedOracle,
    CanonicalPaths,
    brute_distance,
    exhaustive_bottleneck,
    hop_bounded_distances,
    replacement_matrix,
)
from dso.graph_core import (
    UNREACHABLE,
    Failure,
    edge_failure,
    fixture_a,
    fixture_b,
    vertex_failure,
)
from dso.paths import distance_matrix

from conftest import random_graph


# Hand-checked values on fixture_b: chain 0-1-2-3-4 of weight-1 edges plus
# a weight-2 bypass arc 1 -> 3.
def test_fixture_b_hand_values():
    g = fixture_b()
    assert brute_distance(g, 0, 4, vertex_failure(2)) == 4.0
    assert brute_distance(g, 0, 4, edge_failure(1)) == 4.0
    assert brute_distance(g, 0, 4, edge_failure(4)) == 4.0
    assert brute_distance(g, 0, 2, vertex_failure(1)) == UNREACHABLE
    assert brute_distance(g, 2, 4, vertex_failure(3)) == UNREACHABLE


def test_fixture_a_hand_values():
    g = fixture_a()
    assert brute_distance(g, 0, 3, vertex_failure(2)) == 4.0
    assert brute_distance(g, 0, 3, vertex_failure(1)) == 3.0
    assert brute_distance(g, 0, 3, edge_failure(2)) == 4.0


def test_failed_endpoint_is_unreachable():
    g = fixture_b()
    assert brute_distance(g, 0, 4, vertex_failure(0)) == UNREACHABLE
    assert brute_distance(g, 0, 4, vertex_failure(4)) == UNREACHABLE


def test_replacement_matrix_matches_pointwise():
    g = random_graph(8, 20, M=3, seed=2)
    for f in list(g.vertex_failures()) + list(g.edge_failures()):
        mat = replacement_matrix(g, f)
        for u in range(g.n):
            for v in range(g.n):
                if f.kind == "vertex" and f.id in (u, v):
                    assert mat[u, v] == np.inf
                elif u != v:
                    assert mat[u, v] == brute_distance(g, u, v, f)


def test_truncated_oracle_protocol():
    g = fixture_b()
    o = BruteTruncatedOracle(g, 3)
    assert o.query(0, 0, vertex_failure(2)) == 0.0
    assert o.query(0, 4, vertex_failure(0)) == 3
    assert o.query(0, 4, vertex_failure(2)) == 3
    assert o.query(0, 2, vertex_failure(1)) == 3
    assert o.query(0, 2, edge_failure(4)) == 2.0
    assert o.preprocess_count == 1
    assert o.query_count == 5


def test_truncated_oracle_equals_min_of_brute_and_radius():
    g = random_graph(9, 24, M=2, seed=4)
    for radius in (2, 5, g.n * g.M):
        o = BruteTruncatedOracle(g, radius)
        for f in list(g.vertex_failures()) + list(g.edge_failures()):
            for u in range(g.n):
                for v in range(g.n):
                    if u == v or (f.kind == "vertex" and f.id in (u, v)):
                        continue
                    want = min(brute_distance(g, u, v, f), radius)
                    assert o.query(u, v, f) == want


# -- canonical path family -----------------------------------------------------

def test_canonical_path_endpoints_and_length():
    g = random_graph(10, 28, M=3, seed=6)
    cp = CanonicalPaths(g)
    for u in range(g.n):
        for v in range(g.n):
            if u == v or cp.dist[u, v] == np.inf:
                continue
            verts, arcs = cp.path(u, v)
            assert verts[0] == u and verts[-1] == v
            assert len(verts) == len(arcs) + 1
            total = 0
            for pos, e in enumerate(arcs):
                a, b, w = g.arcs[e]
                assert (a, b) == (verts[pos], verts[pos + 1])
                total += w
            assert total == cp.dist[u, v]
            assert len(set(verts)) == len(verts)


def test_bottleneck_agrees_with_exhaustive_enumeration():
    for seed in range(6):
        g = random_graph(8, 18, M=2, directed=bool(seed % 2), seed=seed)
        cp = CanonicalPaths(g)
        for u in range(g.n):
            for v in range(g.n):
                if u == v:
                    continue
                want = exhaustive_bottleneck(g, u, v)
                if want == -1:
                    assert cp.dist[u, v] == np.inf or u == v
                else:
                    assert cp.bottleneck[u, v] == want


def test_subpaths_of_canonical_paths_are_canonical():
    # Property a: the canonical path restricted to two of its vertices is
    # exactly the canonical path between them.
    g = random_graph(11, 30, M=3, seed=8)
    cp = CanonicalPaths(g)
    for u in range(g.n):
        for v in range(g.n):
            if u == v or cp.dist[u, v] == np.inf:
                continue
            verts, arcs = cp.path(u, v)
            for i in range(len(verts)):
                for j in range(i, len(verts)):
                    sub_v, sub_e = cp.path(verts[i], verts[j])
                    assert sub_v == verts[i:j + 1]
                    assert sub_e == arcs[i:j]


def test_untouched_failures_leave_canonical_paths_alone():
    # Property b: removing something off the canonical path does not change
    # the canonical path, recomputed from scratch in the smaller graph.
    g = random_graph(8, 20, M=2, seed=12)
    cp = CanonicalPaths(g)
    fails = list(g.vertex_failures()) + list(g.edge_failures())
    for f in fails:
        cpf = CanonicalPaths(g.remove_failure(f))
        for u in range(g.n):
            for v in range(g.n):
                if u == v or cp.dist[u, v] == np.inf:
                    continue
                on = (cp.vertex_on_path(u, v, f.id) if f.kind == "vertex"
                      else cp.edge_on_path(u, v, f.id))
                if not on:
                    assert cpf.path(u, v) == cp.path(u, v)


def test_hop_bounded_distances_reference():
    g = fixture_b()
    d1 = hop_bounded_distances(g, 1)
    assert d1[0, 1] == 1.0 and d1[0, 2] == np.inf
    dn = hop_bounded_distances(g, g.n - 1)
    assert np.array_equal(dn, distance_matrix(g.view()))


def test_path_raises_for_unreachable():
    g = fixture_b()
    cp = CanonicalPaths(g)
    with pytest.raises(ValueError):
        cp.path(4, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_truncation_monotone_in_radius(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    g = random_graph(n, 3 * n, M=int(rng.integers(1, 4)), seed=seed)
    u, v = int(rng.integers(n)), int(rng.integers(n))
    f = Failure("vertex", int(rng.integers(n)))
    if u == v or f.id in (u, v):
        return
    lo, hi = sorted(rng.integers(1, n * g.M + 1, size=2).tolist())
    a = BruteTruncatedOracle(g, lo).query(u, v, f)
    b = BruteTruncatedOracle(g, hi).query(u, v, f)
    assert a == min(b, lo)
    assert a <= b
