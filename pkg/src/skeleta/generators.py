"""Named small graphs and seeded random generators."""
from __future__ import annotations

import random
from fractions import Fraction

from .graph import Graph, MetricGraph, is_connected, min_valency


def theta(lengths=None):
    """Two vertices joined by three edges ``a``, ``b``, ``c``."""
    g = Graph.from_edges([("a", "u", "v"), ("b", "u", "v"), ("c", "u", "v")])
    return _with_lengths(g, lengths, "abc")


def dumbbell(lengths=None):
    """Self-loop ``a`` at ``u``, bridge ``b`` from ``u`` to ``v``, self-loop ``c`` at ``v``."""
    g = Graph.from_edges([("a", "u", "u"), ("b", "u", "v"), ("c", "v", "v")])
    return _with_lengths(g, lengths, "abc")


def k4(lengths=None):
    names = ["ab", "ac", "ad", "bc", "bd", "cd"]
    g = Graph.from_edges([(n, n[0], n[1]) for n in names])
    return _with_lengths(g, lengths, names)


def bouquet(k: int, lengths=None):
    g = Graph.from_edges([(f"l{i}", "o", "o") for i in range(k)])
    return _with_lengths(g, lengths, [f"l{i}" for i in range(k)])


def path_graph(n: int):
    return Graph.from_edges([(f"p{i}", f"v{i}", f"v{i + 1}") for i in range(n)], vertices=["v0"])


def _with_lengths(g, lengths, names):
    if lengths is None:
        return g
    if isinstance(lengths, dict):
        return MetricGraph(g, {e: Fraction(x) for e, x in lengths.items()})
    return MetricGraph(g, {e: Fraction(x) for e, x in zip(names, lengths)})


def random_connected_multigraph(rng: random.Random, vertices: int, edges: int) -> Graph:
    """Random spanning tree plus extra edges (loops and parallels allowed)."""
    names = [f"v{i}" for i in range(vertices)]
    triples = []
    for i in range(1, vertices):
        triples.append((names[rng.randrange(i)], names[i]))
    while len(triples) < edges:
        triples.append((rng.choice(names), rng.choice(names)))
    rng.shuffle(triples)
    return Graph.from_edges([(f"e{i}", u, v) for i, (u, v) in enumerate(triples)], vertices=names)


def random_min_valency3_graph(rng: random.Random, max_edges: int = 10, attempts: int = 1000) -> Graph:
    """Connected multigraph with every valency at least 3 and at most ``max_edges`` edges."""
    if max_edges < 2:
        raise ValueError("a min-valency-3 graph needs at least 2 edges")
    for _ in range(attempts):
        n_vertices = rng.randint(1, max(1, (2 * max_edges) // 3))
        lo = max(2, -(-3 * n_vertices // 2), n_vertices - 1)
        if lo > max_edges:
            continue
        n_edges = rng.randint(lo, max_edges)
        names = [f"v{i}" for i in range(n_vertices)]
        pairs = [(names[rng.randrange(i)], names[i]) for i in range(1, n_vertices)]
        degree = {v: 0 for v in names}
        for u, v in pairs:
            degree[u] += 1
            degree[v] += 1
        while len(pairs) < n_edges:
            needy = [v for v in names if degree[v] < 3]
            u = rng.choice(needy) if needy else rng.choice(names)
            rest = [v for v in needy if v != u] or names
            v = rng.choice(rest)
            pairs.append((u, v))
            degree[u] += 1
            degree[v] += 1
        rng.shuffle(pairs)
        g = Graph.from_edges([(f"e{i}", u, v) for i, (u, v) in enumerate(pairs)], vertices=names)
        if is_connected(g) and min_valency(g) >= 3:
            return g
    raise RuntimeError("could not generate a min-valency-3 graph")


def random_lengths(rng: random.Random, g: Graph, max_denominator: int = 4,
                   max_value: Fraction = Fraction(1)) -> MetricGraph:
    """Positive lengths ``k/q`` with ``q <= max_denominator`` and value at most ``max_value``."""
    lengths = {}
    for e in g.sorted_edges():
        q = rng.randint(1, max_denominator)
        top = max(1, int(max_value * q))
        lengths[e] = Fraction(rng.randint(1, top), q)
    return MetricGraph(g, lengths)
