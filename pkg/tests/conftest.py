import itertools
import random

import pytest

from roomalloc import Assignment, Graph, build_graph, capacity_for

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def complete_graph(n, prefix="k"):
    ids = [f"{prefix}{i}" for i in range(n)]
    return build_graph(list(itertools.combinations(ids, 2)), ids)


def random_graph(n, p, seed):
    rng = random.Random(seed)
    ids = [f"n{i:02d}" for i in range(n)]
    edges = [(a, b) for a, b in itertools.combinations(ids, 2) if rng.random() < p]
    return build_graph(edges, ids)


def brute_force_min(g: Graph, K: int):
    """Unpruned enumeration of every capacity-feasible map V -> rooms."""
    S = capacity_for(len(g), K)
    edges = [(g.index[u], g.index[v]) for u, v in g.edges()]
    best = None
    for rooms in itertools.product(range(K), repeat=len(g)):
        sizes = [0] * K
        for r in rooms:
            sizes[r] += 1
        if max(sizes) > S:
            continue
        f = sum(1 for i, j in edges if rooms[i] == rooms[j])
        if best is None or f < best:
            best = f
    return best


def assignment(rooms, K, S=None, g=None):
    if S is None:
        S = capacity_for(len(g) if g is not None else len(rooms), K)
    return Assignment(rooms, K, S)


@pytest.fixture
def path3():
    return build_graph([("a", "b"), ("b", "c")])


@pytest.fixture
def path4():
    return build_graph([("a", "b"), ("b", "c"), ("c", "d")])


@pytest.fixture
def triangle():
    return build_graph([("a", "b"), ("b", "c"), ("c", "a")])
