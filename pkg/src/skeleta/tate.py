"""Punctured lines and punctured Tate curves: edge lengths, the ``(n, l, m)``
parameter choice, split intervals, and the two-valuation distinguisher.

On the degree-``mn`` cyclic covering of a punctured Tate curve with
``v = v_p(q)``, a ``Z/p`` torsor ramified at the cusps over vertices ``0``
and ``l`` is split over vertex ``i`` exactly for ``i`` in

* ``I1 = [l + np/(v(p-1)), mn - np/(v(p-1))]`` for the first basis torsor,
* ``I2 = [np/(v(p-1)), l - np/(v(p-1))]`` for the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError
from .graph import Graph, MetricGraph
from .graphio import format_rational
from .padic import KummerQuery, Val, is_prime, preimage_exponent


def _pos(x, name: str) -> Fraction:
    try:
        x = Fraction(x)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a rational, got {x!r}") from None
    if x <= 0:
        raise ParameterError(f"{name} must be positive, got {x}")
    return x


def _check_p(p) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ParameterError(f"p must be a prime, got {p!r}")


def p1_edge_length(v_lambda) -> Val:
    """Length of the single skeleton edge of the line minus ``0, 1, inf, lambda``."""
    v = Val(v_lambda)
    if v.is_inf or not v > 0:
        raise ParameterError(f"v(lambda) must be a positive rational for an edge to exist, got {v}")
    return v


@dataclass(frozen=True)
class TateParams:
    p: int
    v: Fraction
    n: int
    l: int
    m: int

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "v", _pos(self.v, "v"))
        for name in ("n", "l", "m"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        for problem in self.violations():
            raise ParameterError(problem)

    @property
    def shift(self) -> Fraction:
        """``np/(v(p-1))``: the margin each interval loses at both ends."""
        return Fraction(self.n * self.p) / (self.v * (self.p - 1))

    def violations(self) -> list:
        out = []
        if math.gcd(self.n, self.p) != 1:
            out.append(f"n={self.n} is not prime to p={self.p}")
        if self.l < 1 + 2 * self.shift:
            out.append(f"l={self.l} is below 1 + 2np/((p-1)v) = {1 + 2 * self.shift}")
        if self.m < Fraction(2 * self.l, self.n):
            out.append(f"m={self.m} is below 2l/n = {Fraction(2 * self.l, self.n)}")
        return out


@dataclass(frozen=True)
class SplitInterval:
    lo: Fraction
    hi: Fraction

    @property
    def lg(self) -> Fraction:
        return self.hi - self.lo

    @property
    def integer_points(self) -> frozenset:
        return frozenset(range(math.ceil(self.lo), math.floor(self.hi) + 1))

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def n_lower_bound(v_alpha, v_beta, p: int) -> Fraction:
    va, vb = _pos(v_alpha, "v_alpha"), _pos(v_beta, "v_beta")
    if va == vb:
        raise ParameterError("equal valuations: nothing to distinguish")
    return va * vb * (p - 1) / (abs(vb - va) * p)


def choose_parameters(v_alpha, v_beta, p: int) -> tuple:
    """Smallest ``n`` prime to ``p`` over the bound, then smallest ``l`` good for
    both valuations, then smallest ``m``; one ``TateParams`` per valuation."""
    _check_p(p)
    va, vb = _pos(v_alpha, "v_alpha"), _pos(v_beta, "v_beta")
    n = max(1, math.ceil(n_lower_bound(va, vb, p)))
    while n % p == 0:
        n += 1
    l = max(math.ceil(1 + Fraction(2 * n * p) / ((p - 1) * v)) for v in (va, vb))
    m = math.ceil(Fraction(2 * l, n))
    return TateParams(p, va, n, l, m), TateParams(p, vb, n, l, m)


def interval_I1(params: TateParams) -> SplitInterval:
    s = params.shift
    return SplitInterval(params.l + s, params.m * params.n - s)


def interval_I2(params: TateParams) -> SplitInterval:
    s = params.shift
    return SplitInterval(s, params.l - s)


@dataclass(frozen=True)
class DistinguishReport:
    p: int
    params: tuple
    I1: tuple
    I2: tuple
    points: tuple
    lg_gap: Fraction
    gap_bound: Fraction

    @property
    def differ(self) -> bool:
        return self.points[0] != self.points[1]

    def rows(self) -> list:
        out = []
        for label, tp, i1, i2, pts in zip(("alpha", "beta"), self.params, self.I1, self.I2, self.points):
            out.append({
                "side": label,
                "v": format_rational(tp.v),
                "n": tp.n, "l": tp.l, "m": tp.m,
                "I1": str(i1),
                "I1_points": " ".join(map(str, sorted(pts))),
                "lg_I1": format_rational(i1.lg),
                "I2": str(i2),
                "lg_I2": format_rational(i2.lg),
            })
        return out


def distinguish(v_alpha, v_beta, p: int) -> DistinguishReport:
    pa, pb = choose_parameters(v_alpha, v_beta, p)
    i1 = (interval_I1(pa), interval_I1(pb))
    i2 = (interval_I2(pa), interval_I2(pb))
    for tp, a, b in zip((pa, pb), i1, i2):
        if a.lg < 1 or b.lg < 1:
            raise ParameterError(f"interval shorter than 1 for v={tp.v}")
        if a.lo <= b.hi:
            raise ParameterError(f"I1 and I2 overlap for v={tp.v}")
    lo_side, hi_side = sorted((pa, pb), key=lambda t: t.v)
    gap = 2 * lo_side.shift - 2 * hi_side.shift
    lg_gap = abs(i1[1].lg - i1[0].lg)
    report = DistinguishReport(p, (pa, pb), i1, i2, (i1[0].integer_points, i1[1].integer_points), lg_gap, gap)
    if gap < 2 or lg_gap != gap:
        raise ParameterError(f"length gap {gap} is below 2")
    if not report.differ:
        raise ParameterError("split sets coincide")
    return report


def circle_graph(v, n: int, m: int) -> MetricGraph:
    """``mn`` vertices in a circle, edges of length ``v/n``, ``n`` cusps per vertex."""
    v = _pos(v, "v")
    if n < 1 or m < 1:
        raise ParameterError("n and m must be positive")
    size = m * n
    names = [f"x{i}" for i in range(size)]
    edges = [(f"s{i}", names[i], names[(i + 1) % size]) for i in range(size)]
    cusps = [(f"c{i}.{j}", names[i]) for i in range(size) for j in range(n)]
    g = Graph.from_edges(edges, names, cusps)
    return MetricGraph(g, {e: v / n for e, _, _ in edges})


@dataclass(frozen=True)
class BasisPatterns:
    T: frozenset
    T_prime: frozenset
    T_second: frozenset


def torsor_basis_patterns(params: TateParams) -> BasisPatterns:
    """Vertices over which each of the three basis torsors is split."""
    a = interval_I1(params).integer_points
    b = interval_I2(params).integer_points
    if not a or not b:
        raise ParameterError("a split interval has no integer point")
    if a & b:
        raise ParameterError("split intervals intersect")
    everything = frozenset(range(params.m * params.n))
    return BasisPatterns(a, b, everything)


@dataclass(frozen=True)
class WitnessCounts:
    p: int
    e: int
    exponents: tuple
    counts: tuple
    status: str

    @property
    def differ(self) -> bool:
        return self.counts[0] != self.counts[1]


def thm43_witness(v_alpha, v_beta, p: int) -> WitnessCounts:
    """Preimage counts of ``B(1, |lambda - 1|)`` under ``z -> z**(p**e)``,
    ``e = v_beta - 1``, for the two cross-ratio valuations.

    Status ``OK`` when the counts differ, ``UNSUPPORTED`` for the ``p = 2,
    e = 1`` case whose argument is not numeric, ``INCONCLUSIVE`` otherwise.
    """
    _check_p(p)
    va, vb = _pos(v_alpha, "v_alpha"), _pos(v_beta, "v_beta")
    if va >= vb:
        raise ParameterError("need v_alpha < v_beta")
    if vb.denominator != 1 or vb < 2:
        raise ParameterError("v_beta must be an integer >= 2")
    e = int(vb) - 1
    exps = tuple(preimage_exponent(KummerQuery(p, e, Val(v))) for v in (va, vb))
    counts = tuple(p ** i for i in exps)
    if p == 2 and e == 1:
        status = "UNSUPPORTED"
    elif counts[0] != counts[1]:
        status = "OK"
    else:
        status = "INCONCLUSIVE"
    return WitnessCounts(p, e, exps, counts, status)
