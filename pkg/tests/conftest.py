from __future__ import annotations

import itertools
import random
import sys
from collections import Counter

import networkx as nx
import pytest
from hypothesis import strategies as st

from skeleta.generators import random_connected_multigraph, random_min_valency3_graph
from skeleta.graph import Graph


def brute_force_cycle_edge_sets(g: Graph) -> set:
    """Edge sets of simple cycles: connected subgraphs with every degree 2."""
    found = set()
    edges = g.sorted_edges()
    for k in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, k):
            degree = Counter()
            for e in subset:
                u, v = g.edges[e]
                degree[u] += 1
                degree[v] += 1
            if any(d != 2 for d in degree.values()):
                continue
            h = nx.MultiGraph()
            h.add_nodes_from(degree)
            h.add_edges_from(g.edges[e] for e in subset)
            if nx.is_connected(h):
                found.add(tuple(sorted(subset)))
    return found


def to_networkx(g: Graph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for e, (u, v) in g.edges.items():
        h.add_edge(u, v, key=e)
    return h


@st.composite
def small_graphs(draw, max_vertices: int = 5, max_edges: int = 8):
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(max(n - 1, 1), max(max_edges, n - 1)))
    return random_connected_multigraph(rng, n, m)


@st.composite
def valency3_graphs(draw, max_edges: int = 7):
    seed = draw(st.integers(0, 10**6))
    return random_min_valency3_graph(random.Random(seed), max_edges=max_edges)


@pytest.fixture
def rng():
    return random.Random(12345)


def bfs_walk(g: Graph, a, b) -> tuple:
    paths = {a: ()}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            for s in g.steps_from(x):
                y = g.target(s)
                if y not in paths:
                    paths[y] = paths[x] + (s,)
                    nxt.append(y)
        frontier = nxt
    return paths[b]


def random_line_window(seed: int, radius=None):
    """A metric tree ball crossed by the axis of a random loop, plus that axis."""
    from fractions import Fraction

    from skeleta.generators import random_lengths
    from skeleta.graph import enumerate_loops
    from skeleta.tree import TreeLine, ball_window, neighbors

    rng = random.Random(seed)
    g = random_min_valency3_graph(rng, max_edges=4)
    m = random_lengths(rng, g, max_denominator=1, max_value=Fraction(2))
    root = min(g.vertices)
    loop = rng.choice(enumerate_loops(g))
    line = TreeLine(bfs_walk(g, root, g.source(loop.steps[0])), loop.steps)
    center = line.vertex(rng.randint(-3, 3))
    for _ in range(rng.randint(0, 2)):
        center = rng.choice(neighbors(g, root, center))
    if radius is None:
        radius = rng.choice([4, 5])
    return m, root, line, ball_window(m, root, center, radius, line=line)


def probe_vertices(window, lam, k: int, seed: int) -> list:
    """Up to ``k`` interior vertices whose ``lam``-ball stays inside the window."""
    dist = window.distances_from(window.center)
    fits = sorted((z for z in window.interior() if dist[z] + lam < window.radius), key=repr)
    rng = random.Random(seed)
    return fits if len(fits) <= k else rng.sample(fits, k)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
