"""Finite coverings of graphs built from permutation voltages.

A voltage assigns to every base edge ``e = (u, v)`` a permutation ``s`` of
the sheets; lift ``(e, i)`` then joins ``(u, i)`` to ``(v, s[i])``.  Degree-2
voltages are written as bits, 1 meaning "swap the sheets".  Enumeration fixes
the gauge on a BFS spanning tree, so every voltage class appears once.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import CoverError, GraphError
from .graph import Graph, Loop, MetricGraph, is_connected, loop_length

SWAP = (1, 0)
KEEP = (0, 1)


@dataclass(frozen=True)
class ConstraintRow:
    """Pushforward of a cover loop: how many lifts of each base edge it uses."""

    coeffs: Mapping
    rhs: Fraction | None = None

    def __post_init__(self):
        coeffs = {e: int(c) for e, c in dict(self.coeffs).items() if c}
        object.__setattr__(self, "coeffs", MappingProxyType(coeffs))
        if self.rhs is not None:
            object.__setattr__(self, "rhs", Fraction(self.rhs))

    def vector(self, edge_order) -> tuple:
        return tuple(self.coeffs.get(e, 0) for e in edge_order)

    def evaluate(self, lengths: Mapping) -> Fraction:
        return sum((c * Fraction(lengths[e]) for e, c in self.coeffs.items()), Fraction(0))


@dataclass(frozen=True)
class Cover:
    """A covering of ``base`` of the given degree.

    Total-graph vertices are ``(v, sheet)``; edges are ``(e, sheet)`` where
    ``sheet`` is the sheet of the lift's tail.  ``projection`` sends both to
    their base element.  Degree-2 covers are the double covers.
    """

    base: Graph
    degree: int
    voltage: Mapping
    total: Graph
    projection: Mapping
    name: str = "G"
    lengths: Mapping | None = None

    @property
    def bits(self) -> dict:
        if self.degree != 2:
            raise CoverError("bits are only defined for double covers")
        return {e: int(s == SWAP) for e, s in self.voltage.items()}

    @cached_property
    def total_metric(self) -> MetricGraph:
        if self.lengths is None:
            raise CoverError("cover has no lengths")
        lifted = {x: self.lengths[self.projection[x]] for x in self.total.edges}
        return MetricGraph(self.total, lifted)

    def is_connected(self) -> bool:
        return is_connected(self.total)


def _check_base(g: Graph) -> None:
    if g.cusps:
        raise CoverError("coverings are only built for graphs without cusps")


def _split(g):
    if isinstance(g, MetricGraph):
        return g.graph, dict(g.length)
    return g, None


def build_cover(g, voltage: Mapping, name: str = "G") -> Cover:
    """Cover from a permutation voltage (tuples over ``range(degree)``)."""
    graph, lengths = _split(g)
    _check_base(graph)
    missing = set(graph.edges) - set(voltage)
    if missing:
        raise CoverError(f"voltage missing on edges {sorted(missing)!r}")
    perms = {e: tuple(voltage[e]) for e in graph.edges}
    degrees = {len(s) for s in perms.values()}
    if len(degrees) > 1:
        raise CoverError("voltages of different degrees")
    degree = degrees.pop() if degrees else 1
    for e, s in perms.items():
        if sorted(s) != list(range(degree)):
            raise CoverError(f"voltage on {e!r} is not a permutation: {s!r}")
    sheets = range(degree)
    vertices = {(v, i) for v in graph.vertices for i in sheets}
    edges = {}
    projection = {}
    for e, (u, v) in graph.edges.items():
        s = perms[e]
        for i in sheets:
            edges[(e, i)] = ((u, i), (v, s[i]))
            projection[(e, i)] = e
    for x in vertices:
        projection[x] = x[0]
    total = Graph(frozenset(vertices), edges)
    return Cover(graph, degree, MappingProxyType(perms), total,
                 MappingProxyType(projection), name, lengths and MappingProxyType(lengths))


def build_double_cover(g, voltage: Mapping, name: str = "G") -> Cover:
    """Double cover from a 0/1 edge labelling; lengths lift unchanged."""
    graph, _ = _split(g)
    _check_base(graph)
    perms = {}
    for e in graph.edges:
        if e not in voltage:
            raise CoverError(f"voltage missing on edge {e!r}")
        bit = voltage[e]
        if bit not in (0, 1):
            raise CoverError(f"double-cover voltage must be 0 or 1, got {bit!r}")
        perms[e] = SWAP if bit else KEEP
    return build_cover(g, perms, name)


def spanning_tree(g) -> list:
    """BFS spanning tree edges from the least vertex, scanning edges in id order."""
    graph, _ = _split(g)
    if not graph.vertices:
        return []
    root = min(graph.vertices)
    seen = {root}
    tree = []
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for s in graph.steps_from(x):
            y = graph.target(s)
            if y not in seen:
                seen.add(y)
                tree.append(s[0])
                queue.append(y)
    return tree


def non_tree_edges(g) -> list:
    graph, _ = _split(g)
    tree = set(spanning_tree(graph))
    return [e for e in graph.sorted_edges() if e not in tree]


def _require_connected(graph: Graph) -> None:
    _check_base(graph)
    if not is_connected(graph):
        raise CoverError("base graph must be connected")


def enumerate_connected_double_covers(g, name: str = "G") -> list:
    """One cover per nonzero voltage class, named ``name/bits`` where ``bits``
    lists the voltages of the non-tree edges in id order."""
    graph, _ = _split(g)
    _require_connected(graph)
    free = non_tree_edges(graph)
    covers = []
    for bits in itertools.product((0, 1), repeat=len(free)):
        if not any(bits):
            continue
        voltage = {e: 0 for e in graph.edges}
        voltage.update(zip(free, bits))
        label = "".join(map(str, bits))
        covers.append(build_double_cover(g, voltage, f"{name}/{label}"))
    return covers


def _transitive(perms, degree: int) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for s in perms:
            for j in (s[i], s.index(i)):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == degree


def enumerate_connected_covers(g, degree: int, name: str = "G", limit: int | None = None) -> Iterator[Cover]:
    """Lazily yield connected covers of the given degree, one per gauge-fixed
    voltage assignment on the non-tree edges (isomorphic covers are kept)."""
    graph, _ = _split(g)
    _require_connected(graph)
    if degree < 2:
        raise CoverError("degree must be at least 2")
    free = non_tree_edges(graph)
    group = sorted(itertools.permutations(range(degree)))
    identity = tuple(range(degree))
    count = 0
    for labels in itertools.product(range(len(group)), repeat=len(free)):
        perms = [group[k] for k in labels]
        if not _transitive(perms, degree):
            continue
        voltage = {e: identity for e in graph.edges}
        voltage.update(zip(free, perms))
        tag = ".".join(str(k) for k in labels)
        yield build_cover(g, voltage, f"{name}/d{degree}/{tag}")
        count += 1
        if limit is not None and count >= limit:
            return


def push_loop(cover: Cover, c: Loop) -> ConstraintRow:
    """Count, for each base edge, the lifts traversed by a loop of the total graph."""
    try:
        c.validate(cover.total)
    except GraphError as exc:
        raise CoverError(f"not a loop of the total graph: {exc}") from None
    coeffs = {}
    for x in c.edges:
        e = cover.projection[x]
        coeffs[e] = coeffs.get(e, 0) + 1
    rhs = None
    if cover.lengths is not None:
        rhs = loop_length(c, cover.total_metric)
    return ConstraintRow(coeffs, rhs)


def project_loop(cover: Cover, c: Loop) -> tuple:
    """The closed walk in the base traced by a loop of the total graph."""
    return tuple((cover.projection[x], o) for x, o in c.steps)
