import math

import pytest

from twopath import build_graph

# six-vertex worked example: A,B,C,D,E,F = 0..5; C and F follow each other
EXAMPLE_SIX_EDGES = [
    (2, 0),
    (2, 1),
    (2, 5),
    (3, 2),
    (4, 3),
    (4, 1),
    (5, 2),
    (5, 3),
]
A, B, C, D, E, F_ = range(6)


@pytest.fixture
def example_six():
    return build_graph(6, EXAMPLE_SIX_EDGES)


@pytest.fixture
def path3():
    # a -> b -> c
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def two_cycle():
    return build_graph(2, [(0, 1), (1, 0)])


def make_path(n: int):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def make_matrix_graph(rows: int, cols: int):
    """Layered grid: each vertex of row i follows every vertex of row i+1,
    the last row follows a single apex vertex."""
    apex = rows * cols
    edges = []
    for r in range(rows - 1):
        for c in range(cols):
            for c2 in range(cols):
                edges.append((r * cols + c, (r + 1) * cols + c2))
    for c in range(cols):
        edges.append(((rows - 1) * cols + c, apex))
    return build_graph(rows * cols + 1, edges), apex


def make_star_plus_isolated(star_order: int, isolated: int):
    """Star of `star_order` vertices (leaves follow the center, vertex 0)
    plus `isolated` edgeless vertices."""
    n = star_order + isolated
    edges = [(i, 0) for i in range(1, star_order)]
    return build_graph(n, edges)


def within_stderr(empirical: float, exact: float, runs: int, k: float = 4.0) -> bool:
    se = math.sqrt(exact * (1.0 - exact) / runs)
    if se == 0.0:
        return empirical == exact
    return abs(empirical - exact) <= k * se
