"""Edge lengths from loop lengths of a graph and of its connected coverings.

Every loop of the base graph, and every loop of every connected double
cover, gives one linear equation ``sum coeff(e) * f(e) = length``.  When the
base has no vertex of valency below 3 these equations pin ``f`` down; the
check is a rank computation over exact rationals.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

from .covering import (ConstraintRow, Cover, enumerate_connected_covers,
                       enumerate_connected_double_covers, push_loop)
from .errors import CoverError, GraphError, Inconsistent, RankDeficient
from .graph import Graph, Loop, MetricGraph, enumerate_loops, is_connected, loop_length, min_valency
from .linalg import RowSpace, null_space, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstraintSystem:
    rows: tuple
    edge_order: tuple
    sources: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "edge_order", tuple(self.edge_order))
        known = set(self.edge_order)
        for row in self.rows:
            extra = set(row.coeffs) - known
            if extra:
                raise GraphError(f"row uses unknown edges {sorted(extra)!r}")

    def matrix(self) -> list:
        return [list(row.vector(self.edge_order)) for row in self.rows]

    def rhs(self) -> list:
        if any(row.rhs is None for row in self.rows):
            raise GraphError("system has rows without a measured length")
        return [row.rhs for row in self.rows]


@dataclass(frozen=True)
class LoopSource:
    """Where a row came from: the graph it lives on (base or cover) and the loop."""

    name: str
    loop: Loop
    cover: Cover | None = None


def _base_graph(g) -> Graph:
    return g.graph if isinstance(g, MetricGraph) else g


def _check(graph: Graph) -> None:
    if graph.cusps:
        raise CoverError("loop-length systems are only built for graphs without cusps")
    if not is_connected(graph):
        raise GraphError("graph must be connected")


def iter_rows(g, max_degree: int = 2, name: str = "G") -> Iterator:
    """Yield ``(source, row)`` for base loops, then loops of each connected
    double cover, then (if ``max_degree >= 3``) of each connected triple cover."""
    graph = _base_graph(g)
    _check(graph)
    lengths = g.length if isinstance(g, MetricGraph) else None
    for c in enumerate_loops(graph):
        rhs = loop_length(c, g) if lengths is not None else None
        yield LoopSource(name, c), ConstraintRow({e: 1 for e in c.edges}, rhs)
    if max_degree >= 2:
        for cover in enumerate_connected_double_covers(g, name):
            yield from _cover_rows(cover)
    if max_degree >= 3:
        for cover in enumerate_connected_covers(g, 3, name):
            yield from _cover_rows(cover)


def _cover_rows(cover: Cover) -> Iterator:
    for c in enumerate_loops(cover.total):
        yield LoopSource(cover.name, c, cover), push_loop(cover, c)


def constraint_matrix(g, max_degree: int = 2) -> ConstraintSystem:
    graph = _base_graph(g)
    sources, rows = [], []
    for src, row in iter_rows(g, max_degree):
        sources.append(src)
        rows.append(row)
    return ConstraintSystem(rows, graph.sorted_edges(), sources)


def dedupe_rows(rows) -> list:
    """Keep the first row per coefficient vector; differing measurements raise."""
    seen = {}
    out = []
    for i, row in enumerate(rows):
        key = tuple(sorted(row.coeffs.items()))
        if key in seen:
            j, first = seen[key]
            if first.rhs is not None and row.rhs is not None and first.rhs != row.rhs:
                raise Inconsistent(f"rows {j} and {i} have equal coefficients but lengths "
                                   f"{first.rhs} and {row.rhs}", row=i, residual=row.rhs - first.rhs)
            continue
        seen[key] = (i, row)
        out.append(row)
    return out


def solve_lengths(system: ConstraintSystem) -> dict:
    """Unique exact edge lengths, or ``RankDeficient`` / ``Inconsistent``."""
    order = system.edge_order
    if not order:
        return {}
    rows = dedupe_rows(system.rows)
    matrix = [list(r.vector(order)) for r in rows]
    rhs = [r.rhs for r in rows]
    if any(y is None for y in rhs):
        raise GraphError("system has rows without a measured length")
    if not rows:
        raise RankDeficient("no equations", rank=0, null_space=null_space([], len(order)))
    x = solve(matrix, rhs, len(order))
    return dict(zip(order, x))


def column_rank_bound(g) -> int:
    """Upper bound on the rank of any loop system of ``g``.

    Edges through a valency-2 vertex appear together in every loop of every
    covering, and edges into a valency-1 vertex in none.
    """
    graph = _base_graph(g)
    parent = {e: e for e in graph.edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    dead = set()
    for v in graph.vertices:
        steps = graph.steps_from(v)
        ends = len(steps) + sum(1 for w in graph.cusps.values() if w == v)
        if ends == 1:
            dead.add(steps[0][0])
        elif ends == 2 and len(steps) == 2 and steps[0][0] != steps[1][0]:
            a, b = find(steps[0][0]), find(steps[1][0])
            parent[a] = b
    classes = {find(e) for e in graph.edges}
    dead_classes = {find(e) for e in dead}
    return len(classes - dead_classes)


@dataclass(frozen=True)
class RankReport:
    holds: bool
    rank: int
    n_edges: int
    min_valency: int
    degree_used: int
    rows_used: int
    null_space: tuple = field(default_factory=tuple)

    @property
    def valency_ok(self) -> bool:
        return self.min_valency >= 3

    def summary(self) -> str:
        verdict = "true" if self.holds else "false"
        return (f"full_rank={verdict} rank={self.rank} edges={self.n_edges} "
                f"min_valency={self.min_valency} degree={self.degree_used} rows={self.rows_used}")


def verify_prop_a1(g, max_degree: int = 3) -> RankReport:
    """Whether base and double-cover loop lengths determine every edge length.

    Rows are added until the rank reaches the structural bound.  If degree 2
    falls short on a graph of minimal valency at least 3, triple covers are
    tried as well (logged).
    """
    graph = _base_graph(g)
    _check(graph)
    order = graph.sorted_edges()
    n = len(order)
    mv = min_valency(graph) if graph.vertices else 0
    bound = column_rank_bound(graph)
    space = RowSpace(n)
    kept = []
    degree_used = 1
    target = min(bound, n)

    def feed(rows, degree):
        nonlocal degree_used
        for _, row in rows:
            if space.rank >= target:
                return True
            if space.add(row.vector(order)):
                kept.append(row.vector(order))
                degree_used = max(degree_used, degree)
        return space.rank >= target

    done = target == 0 or feed(_rows_of_degree(graph, 1), 1)
    if not done:
        done = feed(_rows_of_degree(graph, 2), 2)
    if not done and max_degree >= 3 and mv >= 3:
        log.warning("double covers give rank %d < %d edges; trying triple covers", space.rank, n)
        done = feed(_rows_of_degree(graph, 3), 3)
    holds = space.rank == n
    ns = tuple(tuple(v) for v in null_space(kept, n)) if not holds else ()
    return RankReport(holds, space.rank, n, mv, degree_used, len(kept), ns)


def _rows_of_degree(graph: Graph, degree: int) -> Iterator:
    if degree == 1:
        for c in enumerate_loops(graph):
            yield LoopSource("G", c), ConstraintRow({e: 1 for e in c.edges})
    elif degree == 2:
        for cover in enumerate_connected_double_covers(graph):
            yield from _cover_rows(cover)
    else:
        for cover in enumerate_connected_covers(graph, degree):
            yield from _cover_rows(cover)
