"""Integer currents on graphs and tree windows, and the splitting tests they give.

A current stores one integer per edge along the edge's stored orientation, so
the reversed edge carries the negative automatically.  Kirchhoff's law is
checked at every vertex that is neither on the truncation boundary nor
carries a cusp.

For the Kummer torsor of exponent ``p**e`` attached to a current:

* if the current vanishes on the closed ball of radius
  ``e + 1/(p-1) + margin`` around ``z``, the torsor is split over ``z``;
* if some flow at ``z`` is nonzero mod ``p**e``, it is not split over ``z``;
* for the current of a single line, split over ``z`` holds exactly when
  ``d(z, line) > e + 1/(p-1)``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import CurrentError, WindowError
from .graph import Graph, Loop, MetricGraph
from .padic import Val, split_threshold
from .tree import TreeWindow

DEFAULT_MARGIN = Fraction(1)


class Splitting(enum.Enum):
    SPLIT = "SPLIT"
    NOT_SPLIT = "NOT_SPLIT"
    UNKNOWN = "UNKNOWN"


def _as_graph(g) -> Graph:
    if isinstance(g, TreeWindow):
        return g.graph
    if isinstance(g, MetricGraph):
        return g.graph
    return g


@dataclass(frozen=True)
class Current:
    graph: Graph
    flow: Mapping
    boundary: frozenset = frozenset()
    line: bool = False

    def __post_init__(self):
        graph = _as_graph(self.graph)
        object.__setattr__(self, "graph", graph)
        flow = {}
        for e, x in dict(self.flow).items():
            if e not in graph.edges:
                raise CurrentError(f"flow on unknown edge {e!r}")
            if int(x) != x:
                raise CurrentError(f"flow on {e!r} is not an integer: {x!r}")
            if x:
                flow[e] = int(x)
        object.__setattr__(self, "flow", MappingProxyType(flow))
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        bad = kirchhoff_defects(self)
        if bad:
            raise CurrentError(f"Kirchhoff's law fails at {bad[:5]!r}")

    def __call__(self, e, orientation: int = 1) -> int:
        return orientation * self.flow.get(e, 0)

    def star(self, v) -> dict:
        """Outgoing flow on each step leaving ``v``."""
        return {s: self(*s) for s in self.graph.steps_from(v)}

    def support(self) -> list:
        return sorted(self.flow)

    def interior(self) -> list:
        cusped = set(self.graph.cusps.values())
        return sorted(v for v in self.graph.vertices if v not in self.boundary and v not in cusped)

    def __add__(self, other: Current) -> Current:
        if other.graph != self.graph:
            raise CurrentError("currents live on different graphs")
        flow = dict(self.flow)
        for e, x in other.flow.items():
            flow[e] = flow.get(e, 0) + x
        return Current(self.graph, flow, self.boundary | other.boundary)

    def __neg__(self) -> Current:
        return Current(self.graph, {e: -x for e, x in self.flow.items()}, self.boundary, self.line)


def kirchhoff_defects(c: Current) -> list:
    """Interior vertices where the outgoing flows do not sum to zero."""
    g = c.graph
    net = {v: 0 for v in g.vertices}
    for e, x in c.flow.items():
        u, v = g.edges[e]
        net[u] += x
        net[v] -= x
    cusped = set(g.cusps.values())
    return sorted(v for v, x in net.items() if x and v not in c.boundary and v not in cusped)


def zero_current(g, boundary=()) -> Current:
    if isinstance(g, TreeWindow):
        boundary = g.boundary
    return Current(_as_graph(g), {}, boundary)


def path_current(g, steps: Sequence, boundary=(), closed: bool | None = None, line: bool = False) -> Current:
    """``+1`` along a simple path or loop, ``-1`` against it.

    An open path adds its two ends to the boundary, where Kirchhoff's law is
    not required.
    """
    graph = _as_graph(g)
    if isinstance(g, TreeWindow):
        boundary = set(boundary) | set(g.boundary)
    steps = tuple((e, int(o)) for e, o in steps)
    if not steps:
        return Current(graph, {}, boundary)
    seen_edges = set()
    for e, o in steps:
        if e not in graph.edges:
            raise CurrentError(f"unknown edge {e!r}")
        if e in seen_edges:
            raise CurrentError(f"path repeats edge {e!r}")
        seen_edges.add(e)
    for a, b in zip(steps, steps[1:]):
        if graph.target(a) != graph.source(b):
            raise CurrentError(f"steps {a!r} and {b!r} do not connect")
    verts = [graph.source(s) for s in steps] + [graph.target(steps[-1])]
    is_closed = verts[0] == verts[-1]
    if closed is not None and closed != is_closed:
        raise CurrentError("path closure does not match the request")
    inner = verts[:-1] if is_closed else verts
    if len(set(inner)) != len(inner):
        raise CurrentError("path visits a vertex twice")
    flow = {}
    for e, o in steps:
        flow[e] = o
    bnd = set(boundary)
    if not is_closed:
        bnd.update((verts[0], verts[-1]))
    return Current(graph, flow, frozenset(bnd), line)


def loop_current(g, c: Loop | Sequence) -> Current:
    steps = c.steps if isinstance(c, Loop) else tuple(c)
    return path_current(g, steps)


def line_current(window: TreeWindow) -> Current:
    """The current of the window's marked line."""
    if window.marked_line is None:
        raise CurrentError("window has no marked line")
    return path_current(window, window.marked_line, line=True)


def translate_sum(c0: Current, translates: Sequence[Mapping]) -> Current:
    """Sum of the pushforwards of ``c0`` along partial vertex maps.

    An edge with both ends in a map's domain must land on an edge; an edge
    with one end in the domain is dropped only if that end lands on the
    boundary (the rest of the translate lies outside the window); edges with
    no end in the domain are dropped.
    """
    g = c0.graph
    between = {}
    for e, (u, v) in g.edges.items():
        between[(u, v)] = (e, 1)
        between[(v, u)] = (e, -1)
    flow = {}
    for phi in translates:
        for e, x in c0.flow.items():
            u, v = g.edges[e]
            hit_u, hit_v = u in phi, v in phi
            if hit_u and hit_v:
                key = (phi[u], phi[v])
                if key not in between:
                    raise CurrentError(f"translate sends edge {e!r} to a non-edge {key!r}")
                f, o = between[key]
                flow[f] = flow.get(f, 0) + o * x
            elif hit_u or hit_v:
                end = phi[u] if hit_u else phi[v]
                if end not in c0.boundary:
                    raise CurrentError(f"translate of edge {e!r} leaves the window at an interior vertex {end!r}")
    return Current(g, flow, c0.boundary, c0.line and len(translates) == 1)


def restrict(c: Current, edges) -> dict:
    keep = set(edges)
    return {e: x for e, x in c.flow.items() if e in keep}


def star_residue_nonzero(c: Current, v, n: int) -> bool:
    if n < 2:
        raise CurrentError(f"modulus must be at least 2, got {n}")
    if v not in c.graph.vertices:
        raise CurrentError(f"unknown vertex {v!r}")
    if v in c.boundary:
        raise CurrentError(f"vertex {v!r} is on the boundary")
    return any(x % n for x in c.star(v).values())


def _lengths(window) -> Mapping:
    if isinstance(window, TreeWindow):
        return window.tree.length
    if isinstance(window, MetricGraph):
        return window.length
    raise CurrentError("split tests need a metric tree window")


def split_by_vanishing(c: Current, window, z, e: int, p: int,
                       margin=DEFAULT_MARGIN, exact_lines: bool = True) -> Splitting:
    """Tri-state splitting verdict of the ``p**e`` Kummer torsor of ``c`` over ``z``."""
    if e < 1:
        raise CurrentError("e must be positive")
    margin = Fraction(margin)
    if margin <= 0:
        raise CurrentError("margin must be positive")
    lengths = _lengths(window)
    graph = c.graph
    boundary = c.boundary | (window.boundary if isinstance(window, TreeWindow) else frozenset())
    if z not in graph.vertices:
        raise CurrentError(f"unknown vertex {z!r}")
    if z in boundary:
        raise CurrentError(f"vertex {z!r} is on the boundary")
    threshold = split_threshold(p, e)
    lam = threshold + margin
    dist = _distances(graph, lengths, z)
    if any(dist[b] <= lam for b in boundary if b in dist):
        raise WindowError(f"the ball of radius {lam} around {z!r} leaves the window")
    near = [x for x, (u, v) in graph.edges.items() if min(dist[u], dist[v]) <= lam]
    if all(c.flow.get(x, 0) == 0 for x in near):
        return Splitting.SPLIT
    if star_residue_nonzero(c, z, p ** e):
        return Splitting.NOT_SPLIT
    if c.line and exact_lines:
        d = min(min(dist[u], dist[v]) for u, v in (graph.edges[x] for x in c.flow))
        return Splitting.SPLIT if d > threshold else Splitting.NOT_SPLIT
    return Splitting.UNKNOWN


def _distances(graph: Graph, lengths: Mapping, z) -> dict:
    dist = {z: Fraction(0)}
    stack = [z]
    while stack:
        x = stack.pop()
        for s in graph.steps_from(x):
            y = graph.target(s)
            if y not in dist:
                dist[y] = dist[x] + lengths[s[0]]
                stack.append(y)
    return dist


def distance_to_support(c: Current, window, z) -> Fraction | None:
    """Distance from ``z`` to the nearest vertex touched by the current."""
    dist = _distances(c.graph, _lengths(window), z)
    touched = [v for x in c.flow for v in c.graph.edges[x]]
    if not touched:
        return None
    return min(dist[v] for v in touched)


def deviation_bound_exponent(d, lam) -> Val:
    """Exponent ``d - lam`` of the bound ``|f(z') - 1| <= p**(d - lam)``."""
    d, lam = Val(d), Val(lam)
    if d < 0:
        raise CurrentError("distance must be nonnegative")
    if not lam > 0:
        raise CurrentError("lambda must be positive")
    return d - lam


def current_to_dot(c: Current, name: str = "current") -> str:
    """DOT text with signed flows as labels on the stored orientation."""
    def q(x):
        return json.dumps(str(x))

    lines = [f"digraph {q(name)} {{"]
    for v in sorted(c.graph.vertices, key=repr):
        shape = "box" if v in c.boundary else "ellipse"
        lines.append(f"  {q(v)} [shape={shape}];")
    for e in sorted(c.graph.edges, key=repr):
        u, v = c.graph.edges[e]
        lines.append(f"  {q(u)} -> {q(v)} [label={q(c(e))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "Current", "Splitting", "kirchhoff_defects", "zero_current", "path_current",
    "loop_current", "line_current", "translate_sum", "restrict", "star_residue_nonzero",
    "split_by_vanishing", "distance_to_support", "deviation_bound_exponent", "current_to_dot",
    "TreeWindow",
]
