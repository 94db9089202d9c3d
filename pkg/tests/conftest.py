"""Shared helpers for the test suite.

Random graphs come from the same generator the CLI uses so test inputs and
command-line inputs stay in one family: m arcs chosen uniformly without
replacement among the distinct ordered (or unordered) pairs, weights uniform
on 1..M.
"""

import numpy as np
import pytest

from dso.harness_cli import generate_graph


def random_graph(n, m=None, M=1, directed=True, seed=0):
    cap = n * (n - 1) if directed else n * (n - 1) // 2
    if m is None:
        m = min(3 * n, cap)
    return generate_graph(n, min(m, cap), M=M, directed=directed, seed=seed)


def graph_grid(sizes, Ms, seeds, directed=True):
    """One graph per (n, M, seed) cell, density 3n capped at the complete graph."""
    for n in sizes:
        for M in Ms:
            for seed in seeds:
                yield random_graph(n, M=M, directed=directed, seed=seed)


@pytest.fixture(scope="session")
def small_graphs():
    """A mixed bag for exhaustive sweeps: directed and undirected, M 1 and 4."""
    out = []
    for i in range(12):
        rng = np.random.default_rng(i)
        n = int(rng.integers(4, 13))
        directed = bool(i % 2)
        cap = n * (n - 1) if directed else n * (n - 1) // 2
        m = int(rng.integers(n, min(3 * n, cap) + 1))
        M = int(rng.choice([1, 4]))
        out.append(random_graph(n, m, M=M, directed=directed, seed=100 + i))
    return out
