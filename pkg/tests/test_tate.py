from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from skeleta.errors import ParameterError
from skeleta.graph import betti, enumerate_loops, loop_length
from skeleta.padic import Val
from skeleta.tate import (TateParams, choose_parameters, circle_graph, distinguish, interval_I1,
                          interval_I2, n_lower_bound, p1_edge_length, thm43_witness,
                          torsor_basis_patterns)


def _sympy_ok(p, v, n, l, m) -> bool:
    v, R = sympy.Rational(v.numerator, v.denominator), sympy.Rational
    return (sympy.igcd(n, p) == 1
            and l >= 1 + R(2 * n * p) / ((p - 1) * v)
            and m >= R(2 * l, n))


def test_worked_instance():
    rep = distinguish(1, 2, 3)
    a, b = rep.params
    assert (a.n, a.l, a.m) == (2, 7, 7)
    assert (str(rep.I1[0]), str(rep.I1[1])) == ("[10, 11]", "[17/2, 25/2]")
    assert rep.points == (frozenset({10, 11}), frozenset({9, 10, 11, 12}))
    assert (str(rep.I2[0]), str(rep.I2[1])) == ("[3, 4]", "[3/2, 11/2]")
    assert rep.lg_gap == 3 and rep.differ


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("va,vb", [(a, b) for a in range(1, 7) for b in range(a + 1, 7)])
def test_parameters_are_valid_and_minimal(p, va, vb):
    pa, pb = choose_parameters(va, vb, p)
    n, l, m = pa.n, pa.l, pa.m
    assert (pb.n, pb.l, pb.m) == (n, l, m)
    bound = sympy.Rational(va * vb * (p - 1), abs(vb - va) * p)
    assert n >= bound
    for v in (va, vb):
        assert _sympy_ok(p, Fraction(v), n, l, m)
    smaller_n = [k for k in range(1, n) if k >= bound and math.gcd(k, p) == 1]
    assert smaller_n == []
    assert not all(_sympy_ok(p, Fraction(v), n, l - 1, math.ceil(Fraction(2 * (l - 1), n)))
                   for v in (va, vb))
    assert not _sympy_ok(p, Fraction(va), n, l, m - 1)
    rep = distinguish(va, vb, p)
    for i1, i2 in zip(rep.I1, rep.I2):
        assert i1.lg >= 1 and i2.lg >= 1
        assert i2.hi < i1.lo
    assert rep.differ
    assert rep.gap_bound >= 2


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=Fraction(1, 4), max_value=8, max_denominator=6),
       st.fractions(min_value=Fraction(1, 4), max_value=8, max_denominator=6),
       st.sampled_from([2, 3, 5, 7]))
def test_interval_lengths_follow_closed_form(va, vb, p):
    if va == vb:
        with pytest.raises(ParameterError):
            choose_parameters(va, vb, p)
        return
    for tp in choose_parameters(va, vb, p):
        i1, i2 = interval_I1(tp), interval_I2(tp)
        shift = Fraction(tp.n * p) / (tp.v * (p - 1))
        assert i1.lg == tp.m * tp.n - tp.l - 2 * shift
        assert i2.lg == tp.l - 2 * shift
        assert i2.hi + 2 * shift <= i1.lo + shift
        assert tp.violations() == []


def test_params_validation():
    with pytest.raises(ParameterError):
        TateParams(3, Fraction(1), 3, 7, 7)
    with pytest.raises(ParameterError):
        TateParams(3, Fraction(1), 2, 6, 7)
    with pytest.raises(ParameterError):
        TateParams(3, Fraction(1), 2, 7, 6)
    with pytest.raises(ParameterError):
        TateParams(4, Fraction(1), 3, 7, 7)
    with pytest.raises(ParameterError):
        TateParams(3, Fraction(-1), 2, 7, 7)
    with pytest.raises(ParameterError):
        n_lower_bound(2, 2, 3)


def test_witness_counts_and_statuses():
    w = thm43_witness(1, 2, 3)
    assert (w.e, w.counts, w.status) == (1, (1, 3), "OK")
    assert thm43_witness(1, 2, 2).status == "UNSUPPORTED"
    assert thm43_witness(1, 3, 2).counts == (1, 2)
    # p = 2, e >= 2 with v_alpha = e sits on the boundary convention
    assert thm43_witness(2, 3, 2).status == "INCONCLUSIVE"
    for p in (3, 5, 7):
        for vb in range(2, 6):
            for va in range(1, vb):
                assert thm43_witness(va, vb, p).differ
    with pytest.raises(ParameterError):
        thm43_witness(2, 1, 3)
    with pytest.raises(ParameterError):
        thm43_witness(1, Fraction(5, 2), 3)


def test_p1_edge_length():
    assert p1_edge_length(Fraction(5, 2)) == Val(Fraction(5, 2))
    for bad in (0, -1, "inf"):
        with pytest.raises(ParameterError):
            p1_edge_length(bad)


def test_circle_graph_and_patterns():
    pa, _ = choose_parameters(1, 2, 3)
    g = circle_graph(pa.v, pa.n, pa.m)
    assert len(g.graph.vertices) == pa.m * pa.n
    assert len(g.graph.cusps) == pa.m * pa.n * pa.n
    assert betti(g.graph) == 1
    (loop,) = enumerate_loops(g)
    assert loop_length(loop, g) == pa.m * pa.v
    pats = torsor_basis_patterns(pa)
    assert pats.T == frozenset({10, 11})
    assert pats.T_prime == frozenset({3, 4})
    assert len(pats.T_second) == pa.m * pa.n
