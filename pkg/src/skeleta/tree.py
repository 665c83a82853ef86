"""The universal-cover tree of a finite graph, modelled by reduced walks.

A vertex of the tree is a reduced walk (tuple of steps) starting at a fixed
root vertex of the graph; the empty walk is the root's lift.  Two walks are
adjacent when one extends the other by a single step.  Closed reduced walks
at the root form the deck group, acting by ``g . w = reduce(g + w)``.

Only combinatorics lives here.  Distances take a length map, so the same
walks can be measured against any metric on the graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import GraphError, WindowError
from .graph import Graph, MetricGraph


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, MetricGraph) else g


def reduce_walk(steps: Sequence) -> tuple:
    """Free reduction: cancel every ``(x, o)(x, -o)`` pair."""
    out = []
    for s in steps:
        if out and out[-1][0] == s[0] and out[-1][1] == -s[1]:
            out.pop()
        else:
            out.append((s[0], s[1]))
    return tuple(out)


def inverse_walk(steps: Sequence) -> tuple:
    return tuple((e, -o) for e, o in reversed(steps))


def is_reduced(steps: Sequence) -> bool:
    return reduce_walk(steps) == tuple(steps)


def is_cyclically_reduced(steps: Sequence) -> bool:
    if not is_reduced(steps) or not steps:
        return False
    first, last = steps[0], steps[-1]
    return not (first[0] == last[0] and first[1] == -last[1])


def walk_end(g, root, steps: Sequence):
    """Vertex of ``g`` reached by following ``steps`` from ``root``; checks adjacency."""
    graph = _as_graph(g)
    x = root
    for s in steps:
        if graph.source(s) != x:
            raise GraphError(f"step {s!r} does not leave {x!r}")
        x = graph.target(s)
    return x


def walk_length(steps: Sequence, lengths: Mapping) -> Fraction:
    return sum((lengths[e] for e, _ in steps), Fraction(0))


def tree_distance(a: Sequence, b: Sequence, lengths: Mapping) -> Fraction:
    return walk_length(reduce_walk(inverse_walk(a) + tuple(b)), lengths)


def neighbors(g, root, w: tuple) -> list:
    """Tree neighbours of ``w`` in edge-id order of the branches at its end."""
    graph = _as_graph(g)
    end = walk_end(graph, root, w)
    return [reduce_walk(w + (s,)) for s in graph.steps_from(end)]


def translate(g_elem: Sequence, w: Sequence) -> tuple:
    """Deck action of a closed walk at the root."""
    return reduce_walk(tuple(g_elem) + tuple(w))


def _common_prefix_with_ray(u: tuple, period: tuple) -> int:
    n = len(period)
    k = 0
    while k < len(u) and u[k] == period[k % n]:
        k += 1
    return k


@dataclass(frozen=True)
class TreeLine:
    """The axis through ``anchor`` of the deck element ``anchor . period . anchor^-1``.

    ``period`` is a cyclically reduced closed walk at the end of ``anchor``.
    Its vertices are ``anchor + period^k + prefix`` for all integers ``k``.
    """

    anchor: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "anchor", reduce_walk(self.anchor))
        period = tuple((e, o) for e, o in self.period)
        if not is_cyclically_reduced(period):
            raise GraphError("a line period must be a nonempty cyclically reduced walk")
        object.__setattr__(self, "period", period)

    def validate(self, g, root) -> None:
        start = walk_end(g, root, self.anchor)
        if walk_end(g, start, self.period) != start:
            raise GraphError("line period is not a closed walk")

    def foot(self, z: Sequence) -> tuple:
        """``(t, sign)``: how far the geodesic from the anchor to ``z`` follows
        the line, and in which direction (``+1`` along ``period``)."""
        u = reduce_walk(inverse_walk(self.anchor) + tuple(z))
        forward = _common_prefix_with_ray(u, self.period)
        backward = _common_prefix_with_ray(u, inverse_walk(self.period))
        if forward >= backward:
            return forward, 1
        return backward, -1

    def offset(self, z: Sequence) -> tuple:
        """Reduced walk from the nearest line vertex to ``z``."""
        u = reduce_walk(inverse_walk(self.anchor) + tuple(z))
        t, _ = self.foot(z)
        return u[t:]

    def distance(self, z: Sequence, lengths: Mapping) -> Fraction:
        return walk_length(self.offset(z), lengths)

    def contains(self, z: Sequence) -> bool:
        return not self.offset(z)

    def vertex(self, k: int) -> tuple:
        """The ``k``-th line vertex, counted in steps from the anchor."""
        n = len(self.period)
        if k >= 0:
            ray = self.period
        else:
            ray = inverse_walk(self.period)
            k = -k
        q, rem = divmod(k, n)
        return reduce_walk(self.anchor + ray * q + ray[:rem])

    def translated(self, g_elem: Sequence) -> TreeLine:
        return TreeLine(translate(g_elem, self.anchor), self.period)


def line_through_loop(steps: Sequence, anchor: Sequence = ()) -> TreeLine:
    return TreeLine(tuple(anchor), tuple(steps))


@dataclass(frozen=True)
class TreeWindow:
    """A finite subtree with its truncation boundary.

    ``tree`` is a metric tree whose vertex ids are walks and whose edge ids are
    the farther-from-root endpoint; ``boundary`` are the leaves where the
    truncation happened; ``marked_line`` is an optional path of steps in
    ``tree`` between two boundary vertices.
    """

    tree: MetricGraph
    boundary: frozenset
    center: tuple = ()
    radius: Fraction | None = None
    marked_line: tuple | None = None
    base: MetricGraph | None = None
    root: object = None

    @property
    def graph(self) -> Graph:
        return self.tree.graph

    def distances_from(self, z) -> dict:
        """Exact distances from ``z`` to every window vertex."""
        g = self.graph
        if z not in g.vertices:
            raise WindowError(f"vertex {z!r} is not in the window")
        dist = {z: Fraction(0)}
        stack = [z]
        while stack:
            x = stack.pop()
            for s in g.steps_from(x):
                y = g.target(s)
                if y not in dist:
                    dist[y] = dist[x] + self.tree.length[s[0]]
                    stack.append(y)
        return dist

    def line_vertices(self) -> list:
        if self.marked_line is None:
            return []
        if not self.marked_line:
            return []
        g = self.graph
        out = [g.source(self.marked_line[0])]
        out.extend(g.target(s) for s in self.marked_line)
        return out

    def interior(self) -> list:
        return sorted(v for v in self.graph.vertices if v not in self.boundary)


def _edge_between(a: tuple, b: tuple) -> tuple:
    """Window edge id and orientation of the step ``a -> b``."""
    if len(b) == len(a) + 1:
        return b, 1
    return a, -1


def ball_window(m: MetricGraph, root, center: Sequence = (), radius=1,
                line: TreeLine | None = None) -> TreeWindow:
    """Materialize every tree vertex whose parent (towards ``center``) lies at
    distance ``< radius``; vertices at distance ``>= radius`` form the boundary."""
    radius = Fraction(radius)
    if radius <= 0:
        raise WindowError("window radius must be positive")
    graph = m.graph
    center = reduce_walk(center)
    walk_end(graph, root, center)
    dist = {center: Fraction(0)}
    edges = {}
    lengths = {}
    boundary = set()
    stack = [center]
    while stack:
        w = stack.pop()
        if dist[w] >= radius:
            boundary.add(w)
            continue
        for x in neighbors(graph, root, w):
            if x in dist:
                continue
            eid, _ = _edge_between(w, x)
            parent = w if len(x) > len(w) else x
            child = x if len(x) > len(w) else w
            edges[eid] = (parent, child)
            lengths[eid] = m.length[eid[-1][0]]
            dist[x] = dist[w] + lengths[eid]
            stack.append(x)
    tree = MetricGraph(Graph(frozenset(dist), edges), lengths)
    marked = None
    if line is not None:
        marked = _clip_line(line, dist, radius)
    return TreeWindow(tree, frozenset(boundary), center, radius, marked, m, root)


def _clip_line(line: TreeLine, dist: Mapping, radius: Fraction) -> tuple | None:
    """Steps of ``line`` inside the window, in the direction of ``period``.

    Distances along the line grow away from the foot of the centre, so the
    clipped part is a single path from boundary to boundary.  A line that
    only touches the boundary is not marked.
    """
    center = min(dist, key=lambda w: (dist[w], len(w)))
    t, sign = line.foot(center)
    start = sign * t
    if line.vertex(start) not in dist or dist[line.vertex(start)] >= radius:
        return None
    lo = hi = start
    while dist[line.vertex(lo)] < radius:
        lo -= 1
    while dist[line.vertex(hi)] < radius:
        hi += 1
    return tuple(_edge_between(line.vertex(k), line.vertex(k + 1)) for k in range(lo, hi))
