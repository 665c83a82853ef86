"""Finite multigraphs with optional cusps, metric structures and simple cycles.

Edges are stored with an orientation ``ends = (tail, head)``; a step
``(edge, +1)`` walks tail to head and ``(edge, -1)`` walks back.  Self-loops and
parallel edges are allowed.  Cusps are half-edges with a single branch.

Vertex and edge ids are opaque, but must be mutually comparable inside one
graph (all ``str``, or all tuples, ...) because every enumeration is sorted.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import GraphError, LoopLimitExceeded

Vertex = Hashable
EdgeId = Hashable
Step = tuple  # (edge id, +1 | -1)

DEFAULT_MAX_LOOPS = 10**6


def max_loops() -> int:
    """Loop-enumeration cap, overridable with ``SKEL_MAX_LOOPS``."""
    raw = os.environ.get("SKEL_MAX_LOOPS")
    if raw is None:
        return DEFAULT_MAX_LOOPS
    try:
        value = int(raw)
    except ValueError:
        raise GraphError(f"SKEL_MAX_LOOPS must be an integer, got {raw!r}") from None
    if value < 1:
        raise GraphError("SKEL_MAX_LOOPS must be positive")
    return value


@dataclass(frozen=True)
class Graph:
    vertices: frozenset
    edges: Mapping[EdgeId, tuple]
    cusps: Mapping[EdgeId, Vertex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        edges = {e: tuple(ends) for e, ends in dict(self.edges).items()}
        cusps = dict(self.cusps)
        for e, ends in edges.items():
            if len(ends) != 2:
                raise GraphError(f"edge {e!r} must have exactly two ends, got {ends!r}")
            for v in ends:
                if v not in self.vertices:
                    raise GraphError(f"edge {e!r} abuts undeclared vertex {v!r}")
        for c, v in cusps.items():
            if c in edges:
                raise GraphError(f"id {c!r} used both as an edge and as a cusp")
            if v not in self.vertices:
                raise GraphError(f"cusp {c!r} abuts undeclared vertex {v!r}")
        object.__setattr__(self, "edges", MappingProxyType(edges))
        object.__setattr__(self, "cusps", MappingProxyType(cusps))

    @classmethod
    def from_edges(cls, edges: Iterable, vertices: Iterable = (), cusps: Iterable = ()) -> Graph:
        """Build from ``(id, u, v)`` triples; endpoints are declared implicitly."""
        emap = {}
        verts = set(vertices)
        for e, u, v in edges:
            if e in emap:
                raise GraphError(f"duplicate edge id {e!r}")
            emap[e] = (u, v)
            verts.update((u, v))
        cmap = {}
        for c, v in cusps:
            if c in cmap:
                raise GraphError(f"duplicate cusp id {c!r}")
            cmap[c] = v
            verts.add(v)
        return cls(frozenset(verts), emap, cmap)

    def sorted_vertices(self) -> list:
        return sorted(self.vertices)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    @cached_property
    def _branches(self) -> dict:
        # vertex -> sorted list of outgoing steps; a self-loop contributes both directions
        out = {v: [] for v in self.vertices}
        for e in sorted(self.edges):
            u, v = self.edges[e]
            out[u].append((e, 1))
            out[v].append((e, -1))
        return out

    def steps_from(self, v: Vertex) -> list:
        """Oriented steps leaving ``v`` in edge-id order."""
        return self._branches[v]

    def source(self, step: Step) -> Vertex:
        e, o = step
        u, v = self.edges[e]
        return u if o == 1 else v

    def target(self, step: Step) -> Vertex:
        e, o = step
        u, v = self.edges[e]
        return v if o == 1 else u

    def is_self_loop(self, e: EdgeId) -> bool:
        u, v = self.edges[e]
        return u == v

    def neighbors(self, v: Vertex) -> set:
        return {self.target(s) for s in self.steps_from(v)}


@dataclass(frozen=True)
class MetricGraph:
    graph: Graph
    length: Mapping[EdgeId, Fraction]

    def __post_init__(self):
        lengths = {}
        for e in self.graph.edges:
            if e not in self.length:
                raise GraphError(f"edge {e!r} has no length")
            value = Fraction(self.length[e])
            if value <= 0:
                raise GraphError(f"edge {e!r} has non-positive length {value}")
            lengths[e] = value
        extra = set(self.length) - set(self.graph.edges)
        if extra:
            raise GraphError(f"lengths given for unknown edges {sorted(extra)!r}")
        object.__setattr__(self, "length", MappingProxyType(lengths))


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, MetricGraph) else g


@dataclass(frozen=True)
class Loop:
    """A simple cycle as a cyclic sequence of oriented steps.

    ``Loop.canonical`` rotates the smallest edge id to the front and picks the
    direction that traverses it forwards (``+1``).
    """

    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((e, int(o)) for e, o in self.steps))
        if not self.steps:
            raise GraphError("a loop needs at least one edge")
        for _, o in self.steps:
            if o not in (1, -1):
                raise GraphError(f"orientation must be +1 or -1, got {o}")

    def __len__(self):
        return len(self.steps)

    @property
    def edges(self) -> tuple:
        return tuple(e for e, _ in self.steps)

    def edge_key(self) -> tuple:
        return tuple(sorted(self.edges))

    def reversed(self) -> Loop:
        return Loop(tuple((e, -o) for e, o in reversed(self.steps)))

    def canonical(self) -> Loop:
        steps = self.steps
        k = min(range(len(steps)), key=lambda i: steps[i][0])
        rotated = steps[k:] + steps[:k]
        if rotated[0][1] == 1:
            return Loop(rotated)
        rev = self.reversed().steps
        k = min(range(len(rev)), key=lambda i: rev[i][0])
        return Loop(rev[k:] + rev[:k])

    def vertices(self, g) -> list:
        g = _as_graph(g)
        return [g.source(s) for s in self.steps]

    def validate(self, g) -> None:
        """Raise ``GraphError`` unless this is a simple cycle of ``g``."""
        g = _as_graph(g)
        for e, _ in self.steps:
            if e not in g.edges:
                raise GraphError(f"loop uses unknown edge {e!r}")
        if len(set(self.edges)) != len(self.steps):
            raise GraphError("loop repeats an edge")
        n = len(self.steps)
        for i, s in enumerate(self.steps):
            if g.target(s) != g.source(self.steps[(i + 1) % n]):
                raise GraphError(f"loop is not closed at step {i}")
        verts = self.vertices(g)
        if len(set(verts)) != len(verts):
            raise GraphError("loop visits a vertex twice")


def valency(g, v: Vertex) -> int:
    g = _as_graph(g)
    if v not in g.vertices:
        raise GraphError(f"unknown vertex {v!r}")
    return len(g.steps_from(v)) + sum(1 for w in g.cusps.values() if w == v)


def min_valency(g) -> int:
    g = _as_graph(g)
    return min(valency(g, v) for v in g.vertices)


def components(g) -> list:
    """Connected components as frozensets of vertices, sorted by least vertex."""
    g = _as_graph(g)
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges.values():
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for v in g.vertices:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(c) for c in groups.values()), key=min)


def is_connected(g) -> bool:
    return len(components(g)) <= 1


def betti(g) -> int:
    """Rank of the cycle space; cusps are ignored."""
    g = _as_graph(g)
    return len(g.edges) - len(g.vertices) + len(components(g))


def enumerate_loops(g, limit: int | None = None) -> list:
    """All simple cycles of ``g``, each once up to rotation and reversal.

    A cycle is found exactly once, from its smallest edge traversed forwards,
    by a depth-first search restricted to larger edges.  Output is sorted by
    the sorted tuple of edge ids.
    """
    g = _as_graph(g)
    if limit is None:
        limit = max_loops()
    order = {e: i for i, e in enumerate(g.sorted_edges())}
    found = []

    def emit(steps):
        found.append(Loop(tuple(steps)))
        if len(found) > limit:
            raise LoopLimitExceeded(f"more than {limit} loops; raise SKEL_MAX_LOOPS to continue")

    for e, k in order.items():
        u, v = g.edges[e]
        if u == v:
            emit([(e, 1)])
            continue
        path = [(e, 1)]
        on_path = {u, v}

        def extend(x):
            for s in g.steps_from(x):
                f = s[0]
                if order[f] <= k or g.is_self_loop(f):
                    continue
                y = g.target(s)
                if y == u:
                    emit(path + [s])
                elif y not in on_path:
                    path.append(s)
                    on_path.add(y)
                    extend(y)
                    on_path.discard(y)
                    path.pop()

        extend(v)
    found.sort(key=Loop.edge_key)
    return found


def loop_length(c: Loop, m: MetricGraph) -> Fraction:
    total = Fraction(0)
    for e in set(c.edges):
        if e not in m.length:
            raise GraphError(f"edge {e!r} has no length")
        total += m.length[e]
    return total


def walk_length(walk: Sequence, m: MetricGraph) -> Fraction:
    """Length of a walk counted with multiplicity."""
    return sum((m.length[e] for e, _ in walk), Fraction(0))


# -- surgeries ---------------------------------------------------------------

def _rebuild(g, graph: Graph, lengths: dict | None):
    if isinstance(g, MetricGraph):
        return MetricGraph(graph, lengths)
    return graph


def delete_edge(g, e: EdgeId):
    graph = _as_graph(g)
    if e not in graph.edges:
        raise GraphError(f"unknown edge {e!r}")
    edges = {x: ends for x, ends in graph.edges.items() if x != e}
    new = Graph(graph.vertices, edges, graph.cusps)
    lengths = None
    if isinstance(g, MetricGraph):
        lengths = {x: l for x, l in g.length.items() if x != e}
    return _rebuild(g, new, lengths)


def contract_subgraph(g, edges: Iterable[EdgeId], vertices: Iterable[Vertex] = ()):
    """Collapse the connected subgraph spanned by ``edges`` (and ``vertices``)
    to its least vertex.  Its edges disappear; other edges are re-attached."""
    graph = _as_graph(g)
    sub_edges = set(edges)
    sub_vertices = set(vertices)
    for e in sub_edges:
        if e not in graph.edges:
            raise GraphError(f"unknown edge {e!r}")
        sub_vertices.update(graph.edges[e])
    for v in sub_vertices:
        if v not in graph.vertices:
            raise GraphError(f"unknown vertex {v!r}")
    if not sub_vertices:
        raise GraphError("cannot contract an empty subgraph")
    h = Graph(frozenset(sub_vertices), {e: graph.edges[e] for e in sub_edges})
    if not is_connected(h):
        raise GraphError("cannot contract a disconnected subgraph")
    hub = min(sub_vertices)

    def image(x):
        return hub if x in sub_vertices else x

    new_edges = {e: (image(u), image(v)) for e, (u, v) in graph.edges.items() if e not in sub_edges}
    new_cusps = {c: image(v) for c, v in graph.cusps.items()}
    new_vertices = (graph.vertices - sub_vertices) | {hub}
    new = Graph(new_vertices, new_edges, new_cusps)
    lengths = None
    if isinstance(g, MetricGraph):
        lengths = {e: l for e, l in g.length.items() if e not in sub_edges}
    return _rebuild(g, new, lengths)


def concatenate_edges(g, a: EdgeId, b: EdgeId, new_id: EdgeId | None = None):
    """Merge edges ``a`` and ``b`` through a shared vertex of valency 2.

    On a metric graph the merged edge has length ``f(a) + f(b)``.
    """
    graph = _as_graph(g)
    for x in (a, b):
        if x not in graph.edges:
            raise GraphError(f"unknown edge {x!r}")
    if a == b:
        raise GraphError("cannot concatenate an edge with itself")
    shared = sorted(set(graph.edges[a]) & set(graph.edges[b]))
    hinge = next((w for w in shared if valency(graph, w) == 2), None)
    if hinge is None:
        raise GraphError(f"edges {a!r} and {b!r} do not meet at a vertex of valency 2")
    if graph.is_self_loop(a) or graph.is_self_loop(b):
        raise GraphError("cannot concatenate through a self-loop")

    def far_end(x):
        u, v = graph.edges[x]
        return v if u == hinge else u

    if new_id is None:
        new_id = f"{a}+{b}"
    if new_id in graph.edges and new_id not in (a, b):
        raise GraphError(f"edge id {new_id!r} already in use")
    edges = {x: ends for x, ends in graph.edges.items() if x not in (a, b)}
    edges[new_id] = (far_end(a), far_end(b))
    new = Graph(graph.vertices - {hinge}, edges, graph.cusps)
    lengths = None
    if isinstance(g, MetricGraph):
        lengths = {x: l for x, l in g.length.items() if x not in (a, b)}
        lengths[new_id] = g.length[a] + g.length[b]
    return _rebuild(g, new, lengths)


def subdivide_edge(g, e: EdgeId, vertex: Vertex | None = None, ids: tuple | None = None):
    """Split ``e`` by a new valency-2 vertex; lengths are halved on metric graphs."""
    graph = _as_graph(g)
    if e not in graph.edges:
        raise GraphError(f"unknown edge {e!r}")
    u, v = graph.edges[e]
    if vertex is None:
        vertex = f"{e}#mid"
    if vertex in graph.vertices:
        raise GraphError(f"vertex {vertex!r} already exists")
    first, second = ids if ids is not None else (f"{e}#1", f"{e}#2")
    edges = {x: ends for x, ends in graph.edges.items() if x != e}
    for x in (first, second):
        if x in edges:
            raise GraphError(f"edge id {x!r} already in use")
    edges[first] = (u, vertex)
    edges[second] = (vertex, v)
    new = Graph(graph.vertices | {vertex}, edges, graph.cusps)
    lengths = None
    if isinstance(g, MetricGraph):
        lengths = {x: l for x, l in g.length.items() if x != e}
        lengths[first] = lengths[second] = g.length[e] / 2
    return _rebuild(g, new, lengths)
