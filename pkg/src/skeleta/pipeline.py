"""Loop lengths from split / not-split answers, and edge lengths from those.

The oracle hides a metric.  Asked whether the ``p**e`` Kummer torsor
attached to a line ``L`` of the universal-cover tree splits over a tree
vertex ``z``, it answers ``d(z, L) > e + 1/(p-1)``.  Everything else here is
combinatorial:

* walk along the axis of a loop ``C`` away from ``L``; past a computable
  start the probe points ``z_i`` satisfy ``d(z_i, L) = r + i * lg(C)``;
* the first non-split exponent at ``z_i`` is
  ``m_i = max(1, ceil(r + i * lg(C) - 1/(p-1)))``;
* the slopes compatible with all ``m_i`` form an interval, and the loop
  length is the only rational of bounded denominator inside it.
"""
from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .covering import ConstraintRow, Cover
from .errors import (AmbiguousLength, GraphError, Inconsistent, NoCandidate, ParameterError,
                     RankDeficient, SplitSaturated, WindowError)
from .graph import Graph, Loop, MetricGraph, enumerate_loops, is_connected, min_valency
from .linalg import RowSpace
from .padic import is_prime, split_threshold
from .reconstruct import ConstraintSystem, dedupe_rows, iter_rows, solve_lengths
from .tree import TreeLine, TreeWindow, ball_window

log = logging.getLogger(__name__)

DEFAULT_E_MAX = 64
DEFAULT_I_MAX = 256
DEFAULT_DENOM_BOUND = 12
DEFAULT_EXTRA_ROWS = 4
MAX_START_SEARCH = 10_000
DEFAULT_MAX_REFERENCES = None
DEFAULT_MAX_COMBINATIONS = 20_000


class SplitOracle:
    """Answers split queries from a hidden metric on the base graph.

    A query names the graph it is about (``None`` for the base, or a cover of
    it); lengths of cover edges are those of their projections.
    """

    def __init__(self, hidden: MetricGraph, p: int):
        if not is_prime(p):
            raise ParameterError(f"p must be a prime, got {p!r}")
        self._hidden = hidden
        self.p = p
        self.queries = 0
        self._lifted = {}

    @property
    def structure(self) -> Graph:
        return self._hidden.graph

    def _lengths(self, cover: Cover | None):
        if cover is None:
            return self._hidden.length
        key = cover.name
        if key not in self._lifted:
            if cover.base != self._hidden.graph:
                raise GraphError("cover is not a cover of the hidden graph")
            self._lifted[key] = {x: self._hidden.length[cover.projection[x]] for x in cover.total.edges}
        return self._lifted[key]

    def split(self, cover: Cover | None, line: TreeLine, z: tuple, e: int) -> bool:
        self.queries += 1
        d = line.distance(z, self._lengths(cover))
        return d > split_threshold(self.p, e)


def splitting_index(split: Callable[[int], bool], e_max: int = DEFAULT_E_MAX) -> int:
    """``1 + max{e >= 1 : split(e)}`` (``1`` if none), assuming splitting is
    monotone in ``e``; raises ``SplitSaturated`` if ``split(e_max)`` holds."""
    if e_max < 1:
        raise ParameterError("e_max must be at least 1")
    if not split(1):
        return 1
    if split(e_max):
        raise SplitSaturated(f"still split at e_max={e_max}")
    lo, hi = 1, e_max  # split(lo) and not split(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if split(mid):
            lo = mid
        else:
            hi = mid
    return hi


def expected_index(d, p: int) -> int:
    """``max(1, ceil(d - 1/(p-1)))``."""
    return max(1, math.ceil(Fraction(d) - Fraction(1, p - 1)))


def _bfs_paths(graph: Graph, root) -> dict:
    """Reduced walk from ``root`` to every vertex along a BFS tree."""
    paths = {root: ()}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for s in graph.steps_from(x):
            y = graph.target(s)
            if y not in paths:
                paths[y] = paths[x] + (s,)
                queue.append(y)
    return paths


@dataclass(frozen=True)
class CoverWindow:
    """Probe points along the axis of ``loop`` in the universal cover of ``graph``.

    ``line`` is the axis through the root lift, ``reference`` the axis of a
    different loop.  ``z(i)`` is ``loop**(start + i)``; for ``i >= 0`` the
    geodesic from ``reference`` to ``z(i + 1)`` passes through ``z(i)``.
    """

    graph: Graph
    loop: Loop
    root: object
    line: TreeLine
    reference: TreeLine
    reference_loop: Loop
    start: int
    cover: Cover | None = None
    window: TreeWindow | None = None

    def z(self, i: int) -> tuple:
        if i < 0:
            raise ParameterError("probe index must be nonnegative")
        return self.line.vertex((self.start + i) * len(self.loop))

    def offset(self, i: int) -> tuple:
        """Walk from the reference line to ``z(i)``."""
        return self.reference.offset(self.z(i))


def probe_windows(graph: Graph, loop: Loop, loops: list | None = None,
                  cover: Cover | None = None) -> Iterator[CoverWindow]:
    """Probe set-ups along ``loop``, one per other loop of ``graph`` used as reference."""
    loop.validate(graph)
    root = graph.source(loop.steps[0])
    if loops is None:
        loops = enumerate_loops(graph)
    key = loop.edge_key()
    paths = _bfs_paths(graph, root)
    line = TreeLine((), loop.steps)
    period = tuple(loop.steps)
    for other in loops:
        if other.edge_key() == key:
            continue
        anchor_end = graph.source(other.steps[0])
        if anchor_end not in paths:
            continue
        reference = TreeLine(paths[anchor_end], other.steps)
        prev = reference.offset(line.vertex(0))
        for k in range(MAX_START_SEARCH):
            nxt = reference.offset(line.vertex((k + 1) * len(period)))
            if nxt == prev + period:
                yield CoverWindow(graph, loop, root, line, reference, other, k, cover)
                break
            prev = nxt
        else:
            raise WindowError("probe axis never leaves the reference line")


def probe_window(graph: Graph, loop: Loop, loops: list | None = None, cover: Cover | None = None) -> CoverWindow:
    """Probe set-up against the first other loop of ``graph``."""
    for cw in probe_windows(graph, loop, loops, cover):
        return cw
    raise GraphError("need a second loop to measure against")


def build_window(g: MetricGraph, loop: Loop, depth, loops: list | None = None) -> CoverWindow:
    """Probe set-up plus the materialized tree ball of radius ``depth`` around ``z(0)``."""
    depth = Fraction(depth)
    if depth <= 0:
        raise WindowError("window depth must be positive")
    graph = g.graph
    cw = probe_window(graph, loop, loops)
    period = sum((g.length[e] for e in loop.edges), Fraction(0))
    if depth < period:
        raise WindowError(f"depth {depth} does not reach z1 (loop length {period})")
    centre = cw.z(0)
    window = ball_window(g, cw.root, centre, depth, line=cw.line)
    return CoverWindow(cw.graph, cw.loop, cw.root, cw.line, cw.reference, cw.reference_loop,
                       cw.start, None, window)


def sample_indices(oracle: SplitOracle, cw: CoverWindow, i_max: int, e_max: int = DEFAULT_E_MAX) -> list:
    """``[m(z_0), m(z_1), ...]`` up to ``i_max`` or until the oracle saturates."""
    out = []
    for i in range(i_max + 1):
        z = cw.z(i)
        try:
            m = splitting_index(lambda e: oracle.split(cw.cover, cw.reference, z, e), e_max)
        except SplitSaturated:
            break
        out.append(m)
    return out


def slope_interval(samples: list, p: int) -> tuple:
    """Slopes ``s > 0`` for which some ``r >= 0`` reproduces every sample.

    Returns ``(lo, lo_closed, hi, hi_closed)``.  With ``x = r - 1/(p-1)``
    each sample gives ``x + i s <= m_i``, and ``x + i s > m_i - 1`` unless
    ``m_i = 1``; eliminating ``x`` leaves bounds on ``s``.
    """
    c = Fraction(1, p - 1)
    box = (Fraction(0), False, None, False)
    for j, mj in enumerate(samples):
        if j >= 1:
            box = _tighten(box, upper=(Fraction(mj) / j + c / j, True))
    # strict bounds as integer ratios (num, den), den > 0, compared by cross-multiplying
    upper = lower = None
    unclamped = [i for i, mi in enumerate(samples) if mi >= 2]
    for i in unclamped:
        mi = samples[i]
        for j in range(i + 1, len(samples)):
            num, den = samples[j] - mi + 1, j - i
            if upper is None or num * upper[1] < upper[0] * den:
                upper = (num, den)
        for j in range(i):
            num, den = mi - 1 - samples[j], i - j
            if lower is None or num * lower[1] > lower[0] * den:
                lower = (num, den)
    if upper is not None:
        box = _tighten(box, upper=(Fraction(*upper), False))
    if lower is not None:
        box = _tighten(box, lower=(Fraction(*lower), False))
    if box[2] is None:
        raise NoCandidate("need at least two samples to bound the slope")
    return box


def _tighten(box: tuple, lower: tuple | None = None, upper: tuple | None = None) -> tuple:
    lo, lo_closed, hi, hi_closed = box
    if lower is not None:
        value, closed = lower
        if value > lo or (value == lo and not closed):
            lo, lo_closed = value, closed
    if upper is not None and upper[0] is not None:
        value, closed = upper
        if hi is None or value < hi or (value == hi and not closed):
            hi, hi_closed = value, closed
    return lo, lo_closed, hi, hi_closed


def intersect_intervals(a: tuple, b: tuple) -> tuple:
    return _tighten(a, lower=(b[0], b[1]), upper=(b[2], b[3]))


def rationals_in(lo, lo_closed, hi, hi_closed, denom_bound: int) -> list:
    found = set()
    for q in range(1, denom_bound + 1):
        k = math.floor(lo * q)
        while True:
            x = Fraction(k, q)
            if x > hi or (x == hi and not hi_closed):
                break
            if x > lo or (x == lo and lo_closed):
                found.add(x)
            k += 1
    return sorted(found)


@dataclass(frozen=True)
class LengthEstimate:
    value: Fraction
    samples: tuple
    interval: tuple
    references: int


def estimate_loop_length(oracle: SplitOracle, windows, i_max: int = DEFAULT_I_MAX,
                         denom_bound: int = DEFAULT_DENOM_BOUND, e_max: int = DEFAULT_E_MAX,
                         max_references: int | None = None) -> LengthEstimate:
    """Snap the loop length from probes against one or more references.

    Every reference has its own unknown offset ``r`` but shares the slope, so
    the slope intervals intersect.  References are consumed until a single
    candidate with denominator at most ``denom_bound`` is left.
    """
    if i_max < 1:
        raise ParameterError("i_max must be at least 1")
    if denom_bound < 1:
        raise ParameterError("denom_bound must be at least 1")
    if isinstance(windows, CoverWindow):
        windows = [windows]
    box = None
    all_samples = []
    used = 0
    cands = []
    for cw in windows:
        if max_references is not None and used >= max_references:
            break
        samples = sample_indices(oracle, cw, i_max, e_max)
        if len(samples) < 2:
            continue
        used += 1
        all_samples.append(tuple(samples))
        one = slope_interval(samples, oracle.p)
        box = one if box is None else intersect_intervals(box, one)
        cands = rationals_in(*box, denom_bound)
        if len(cands) <= 1:
            break
    if box is None:
        raise SplitSaturated(f"fewer than two probes below e_max={e_max}")
    if not cands:
        raise NoCandidate(f"no rational with denominator <= {denom_bound} in the slope interval")
    if len(cands) > 1:
        raise AmbiguousLength(f"{len(cands)} candidates with denominator <= {denom_bound}", cands)
    return LengthEstimate(cands[0], tuple(all_samples), box, used)


def recover_loop_length(oracle: SplitOracle, window, i_max: int = DEFAULT_I_MAX,
                        denom_bound: int = DEFAULT_DENOM_BOUND, e_max: int = DEFAULT_E_MAX) -> Fraction:
    return estimate_loop_length(oracle, window, i_max, denom_bound, e_max).value


@dataclass
class RowOutcome:
    source: str
    loop: Loop
    coeffs: dict
    value: Fraction | None = None
    error: str | None = None
    samples: int = 0
    candidates: tuple = ()
    joint: bool = False


@dataclass
class RecoveryReport:
    structure: Graph
    p: int
    lengths: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    queries: int = 0
    candidates: int = 0

    @property
    def metric(self) -> MetricGraph:
        return MetricGraph(self.structure, self.lengths)

    @property
    def resolved(self) -> list:
        return [r for r in self.rows if r.value is not None]

    @property
    def unresolved(self) -> list:
        return [r for r in self.rows if r.value is None]


def _check_structure(structure: Graph) -> None:
    if structure.cusps:
        raise GraphError("structure must not have cusps")
    if not structure.edges or not is_connected(structure):
        raise GraphError("structure must be a connected graph with edges")
    if min_valency(structure) < 3:
        raise GraphError("every vertex must have valency at least 3")


def run_recovery(structure: Graph, oracle: SplitOracle, i_max: int = DEFAULT_I_MAX,
                 denom_bound: int = DEFAULT_DENOM_BOUND, e_max: int = DEFAULT_E_MAX,
                 extra_rows: int = DEFAULT_EXTRA_ROWS, max_degree: int = 2,
                 max_references: int | None = DEFAULT_MAX_REFERENCES,
                 edge_denom_bound: int | None = None,
                 max_combinations: int = DEFAULT_MAX_COMBINATIONS) -> RecoveryReport:
    """Recover every edge length of ``structure`` through the oracle.

    Candidate loops come from the base and its connected double covers, one
    per distinct pushforward, shortest (fewest edges) first.  A loop is
    measured when it raises the rank, or as one of ``extra_rows`` redundant
    checks.  Loops that cannot be measured within ``e_max`` are skipped.
    With ``edge_denom_bound`` set, loops left ambiguous are settled jointly
    when that is the only way to reach full rank.
    """
    _check_structure(structure)
    order = structure.sorted_edges()
    n = len(order)
    seen = {}
    candidates = []
    loops_by_graph = {}
    for idx, (src, row) in enumerate(iter_rows(structure, max_degree)):
        key = tuple(sorted(row.coeffs.items()))
        if key in seen:
            continue
        seen[key] = idx
        candidates.append((sum(row.coeffs.values()), idx, src, row))
    candidates.sort(key=lambda t: (t[0], t[1]))
    report = RecoveryReport(structure, oracle.p, candidates=len(candidates))
    space = RowSpace(n)
    measured = []
    extras = 0
    start_queries = oracle.queries
    for _, _, src, row in candidates:
        if space.rank == n and extras >= extra_rows:
            break
        vec = row.vector(order)
        independent = not space.contains(vec)
        if not independent and extras >= extra_rows:
            continue
        graph = src.cover.total if src.cover is not None else structure
        if src.name not in loops_by_graph:
            loops_by_graph[src.name] = enumerate_loops(graph)
        outcome = RowOutcome(src.name, src.loop, dict(row.coeffs))
        try:
            windows = probe_windows(graph, src.loop, loops_by_graph[src.name], src.cover)
            est = estimate_loop_length(oracle, windows, i_max, denom_bound, e_max, max_references)
        except (SplitSaturated, NoCandidate, AmbiguousLength) as exc:
            outcome.error = f"{type(exc).__name__}: {exc}"
            if isinstance(exc, AmbiguousLength):
                outcome.candidates = tuple(exc.candidates)
            report.rows.append(outcome)
            continue
        outcome.value = est.value
        outcome.samples = sum(map(len, est.samples))
        report.rows.append(outcome)
        measured.append(ConstraintRow(row.coeffs, est.value))
        if independent:
            space.add(vec)
        else:
            extras += 1
    report.queries = oracle.queries - start_queries
    if space.rank < n and edge_denom_bound is not None:
        measured.extend(_joint_resolve(report, measured, order, edge_denom_bound, max_combinations))
    report.lengths = solve_lengths(ConstraintSystem(dedupe_rows(measured), order))
    return report


def _joint_resolve(report: RecoveryReport, measured: list, order: list, edge_denom_bound: int,
                   max_combinations: int) -> list:
    """Settle ambiguous rows by requiring every edge length to have a small denominator.

    Ambiguous rows that complete the rank take each of their candidate values
    in turn; a combination survives if the solved lengths are positive with
    denominators at most ``edge_denom_bound`` and every other ambiguous row
    evaluates to one of its own candidates.  Exactly one survivor is
    accepted; otherwise nothing is added and the caller's solve reports the
    rank deficiency.
    """
    n = len(order)
    space = RowSpace(n)
    for row in measured:
        space.add(row.vector(order))
    ambiguous = [r for r in report.rows if r.value is None and r.candidates]
    chosen, checks = [], []
    for r in ambiguous:
        vec = tuple(r.coeffs.get(e, 0) for e in order)
        (chosen if space.rank < n and space.add(vec) else checks).append(r)
    if space.rank < n or not chosen:
        return []
    total = math.prod(len(r.candidates) for r in chosen)
    if total > max_combinations:
        log.warning("joint resolution skipped: %d combinations exceed %d", total, max_combinations)
        return []
    survivors = []
    for values in itertools.product(*(r.candidates for r in chosen)):
        rows = measured + [ConstraintRow(r.coeffs, v) for r, v in zip(chosen, values)]
        try:
            lengths = solve_lengths(ConstraintSystem(dedupe_rows(rows), order))
        except (Inconsistent, RankDeficient):
            continue
        if any(x <= 0 or x.denominator > edge_denom_bound for x in lengths.values()):
            continue
        if any(ConstraintRow(r.coeffs).evaluate(lengths) not in r.candidates for r in checks):
            continue
        survivors.append(values)
        if len(survivors) > 1:
            return []
    if not survivors:
        return []
    for r, v in zip(chosen, survivors[0]):
        r.value, r.joint = v, True
    return [ConstraintRow(r.coeffs, v) for r, v in zip(chosen, survivors[0])]


def recover_all(structure: Graph, oracle: SplitOracle, **kwargs) -> MetricGraph:
    return run_recovery(structure, oracle, **kwargs).metric
