from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from skeleta.errors import ValuationError
from skeleta.padic import (KummerQuery, Val, image_valuation, interval_bounds, is_prime,
                           is_split_ball, preimage_count, preimage_exponent, pullback_ball,
                           split_threshold)

primes = st.sampled_from([2, 3, 5, 7])
exps = st.integers(0, 6)
vals = st.fractions(min_value=0, max_value=10, max_denominator=24)


def itemized_exponent(p: int, e: int, v: Fraction) -> int:
    """Direct reading of the membership list, written independently of the package."""
    if e == 0:
        return 0
    c = Fraction(1, p - 1)
    if v > e + c:
        return e
    if v == e + c:
        return e - 1
    if v < Fraction(p, p - 1):
        return 0
    hits = [i for i in range(1, e) if i + c <= v < i + Fraction(p, p - 1)]
    assert len(hits) == 1
    return hits[0]


def composed_exponent(p: int, e: int, v: Fraction) -> int:
    """Number of times the ball splits when pulled back through ``z -> z**p`` ``e`` times."""
    count = 0
    cur = Val(v)
    for _ in range(e):
        splits, cur = pullback_ball(p, cur)
        count += splits
    return count


def on_boundary(p: int, e: int, v: Fraction) -> bool:
    c = Fraction(1, p - 1)
    return any(v == i + c for i in range(1, e + 1))


@pytest.mark.parametrize("p,e,v,i", [
    (3, 2, Fraction(3), 2),
    (3, 2, Fraction(5, 2), 1),
    (3, 2, Fraction(3, 2), 1),
    (3, 2, Fraction(7, 5), 0),
    (2, 1, Fraction(2), 0),
    (2, 1, Fraction(3), 1),
    (2, 3, Fraction(2), 1),
    (2, 3, Fraction(3), 2),
    (2, 3, Fraction(4), 2),
    (2, 3, Fraction(9, 2), 3),
    (5, 0, Fraction(100), 0),
])
def test_exponent_table(p, e, v, i):
    q = KummerQuery(p, e, Val(v))
    assert preimage_exponent(q) == i
    assert preimage_count(q) == p ** i


def test_infinite_valuation_is_fully_split():
    q = KummerQuery(2, 4, Val("inf"))
    assert is_split_ball(q)
    assert preimage_exponent(q) == 4


@settings(max_examples=400, deadline=None)
@given(primes, exps, vals)
def test_exponent_matches_itemized_list(p, e, v):
    q = KummerQuery(p, e, Val(v))
    assert preimage_exponent(q) == itemized_exponent(p, e, v)
    assert is_split_ball(q) == (e == 0 or v > split_threshold(p, e))


@settings(max_examples=400, deadline=None)
@given(primes, exps, vals)
def test_composition_law_off_boundaries(p, e, v):
    assume(not on_boundary(p, e, v))
    assert preimage_exponent(KummerQuery(p, e, Val(v))) == composed_exponent(p, e, v)


@settings(max_examples=200, deadline=None)
@given(primes, exps, vals, vals)
def test_monotone_in_v(p, e, a, b):
    lo, hi = sorted((a, b))
    assert preimage_exponent(KummerQuery(p, e, Val(lo))) <= preimage_exponent(KummerQuery(p, e, Val(hi)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("e", [1, 2, 3, 5])
def test_intervals_tile(p, e):
    assert Fraction(p, p - 1) == 1 + Fraction(1, p - 1)
    bounds = [interval_bounds(p, e, i) for i in range(e + 1)]
    assert bounds[0][0] == 0 and bounds[0][2]
    assert bounds[-1][1] == math.inf
    for (lo, hi, lc, hc), (lo2, hi2, lc2, hc2) in zip(bounds, bounds[1:]):
        assert hi == lo2
        assert hc != lc2  # the junction belongs to exactly one side
    for i, (lo, hi, lc, hc) in enumerate(bounds):
        for v in (lo, (lo + hi) / 2 if hi != math.inf else lo + 1):
            inside = (v > lo or (v == lo and lc)) and (v < hi or (v == hi and hc))
            if inside:
                assert preimage_exponent(KummerQuery(p, e, Val(v))) == i


def test_pullback_and_image():
    assert pullback_ball(3, 3) == (True, Val(2))
    assert pullback_ball(3, 1) == (False, Val(Fraction(1, 3)))
    assert pullback_ball(2, 2) == (False, Val(1))
    assert image_valuation(3, Fraction(1, 2)) == Val(Fraction(3, 2))
    assert image_valuation(2, 3) == Val(4)
    assert image_valuation(2, "inf").is_inf


@settings(max_examples=200, deadline=None)
@given(primes, st.fractions(min_value=0, max_value=20, max_denominator=30))
def test_image_undoes_pullback(p, v):
    _, back = pullback_ball(p, v)
    assert image_valuation(p, back) == Val(v)


def test_val_arithmetic_and_ordering():
    assert Val(1) + Val("inf") == Val("inf")
    assert Val(Fraction(1, 2)) + 1 == Val(Fraction(3, 2))
    assert Val(3) - 1 == Val(2)
    assert Val(2) < Val("inf")
    assert str(Val(Fraction(7, 3))) == "7/3"
    assert str(Val("inf")) == "inf"
    with pytest.raises(ValuationError):
        Val(0.5)
    with pytest.raises(ValuationError):
        Val(1) - Val("inf")
    with pytest.raises(AttributeError):
        Val(1).value = 2


def test_query_validation():
    with pytest.raises(ValuationError):
        KummerQuery(4, 1, Val(1))
    with pytest.raises(ValuationError):
        KummerQuery(3, -1, Val(1))
    with pytest.raises(ValuationError):
        KummerQuery(3, 1, Val(-1))
    with pytest.raises(ValuationError):
        KummerQuery(True, 1, Val(1))
    with pytest.raises(ValuationError):
        split_threshold(1, 1)


def test_is_prime_against_trial_division():
    for n in range(-3, 200):
        assert is_prime(n) == (n > 1 and all(n % k for k in range(2, n)))
