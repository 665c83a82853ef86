"""Exact valuations and the splitting law of ``z -> z**(p**e)`` over a ball ``B(1, r)``.

Radii are carried as valuations ``v`` with ``r = p**(-v)``; ``v = inf`` is the
point ``r = 0``.  The ball ``B(1, r)`` has ``p**i`` preimages where

* ``i = 0``        for ``0 <= v < p/(p-1)``
* ``1 <= i < e``   for ``i + 1/(p-1) <= v < i + p/(p-1)``
* ``i = e``        for ``v > e + 1/(p-1)``

and the single point ``v = e + 1/(p-1)`` gets ``i = e - 1``, so that "all
``p**e`` preimages" coincides with the strict splitting test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import ValuationError

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@total_ordering
class Val:
    """An exact rational valuation or ``+inf``."""

    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, Val):
            value = value.value
        if isinstance(value, float):
            if value != INF:
                raise ValuationError("valuations are exact rationals or +inf, not floats")
        elif isinstance(value, str) and value.strip() == "inf":
            value = INF
        else:
            try:
                value = Fraction(value)
            except (TypeError, ValueError, ZeroDivisionError):
                raise ValuationError(f"not a valuation: {value!r}") from None
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Val is immutable")

    @property
    def is_inf(self) -> bool:
        return self.value == INF

    def __eq__(self, other):
        try:
            return self.value == Val(other).value
        except ValuationError:
            return NotImplemented

    def __lt__(self, other):
        return self.value < Val(other).value

    def __hash__(self):
        return hash(self.value)

    def __add__(self, other):
        other = Val(other)
        if self.is_inf or other.is_inf:
            return Val(INF)
        return Val(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = Val(other)
        if other.is_inf:
            raise ValuationError("cannot subtract an infinite valuation")
        if self.is_inf:
            return Val(INF)
        return Val(self.value - other.value)

    def __repr__(self):
        return f"Val({'inf' if self.is_inf else self.value})"

    def __str__(self):
        if self.is_inf:
            return "inf"
        x = self.value
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _check_p(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        raise ValuationError(f"p must be a prime, got {p!r}")


def _check_e(e: int) -> None:
    if not isinstance(e, int) or isinstance(e, bool) or e < 0:
        raise ValuationError(f"e must be a nonnegative integer, got {e!r}")


@dataclass(frozen=True)
class KummerQuery:
    p: int
    e: int
    v: Val

    def __post_init__(self):
        _check_p(self.p)
        _check_e(self.e)
        v = Val(self.v)
        if v < 0:
            raise ValuationError(f"ball radius must be at most 1 (v >= 0), got v={v}")
        object.__setattr__(self, "v", v)


def split_threshold(p: int, e: int) -> Fraction:
    """``e + 1/(p-1)``: the ball splits completely exactly when ``v`` exceeds this."""
    if not isinstance(p, int) or p < 2:
        raise ValuationError(f"p must be at least 2, got {p!r}")
    _check_e(e)
    return e + Fraction(1, p - 1)


def is_split_ball(q: KummerQuery) -> bool:
    if q.e == 0:
        return True
    return q.v > split_threshold(q.p, q.e)


def preimage_exponent(q: KummerQuery) -> int:
    """``i`` such that ``B(1, p**-v)`` has ``p**i`` preimages."""
    if q.e == 0:
        return 0
    if is_split_ball(q):
        return q.e
    shift = Fraction(1, q.p - 1)
    i = math.floor(q.v.value - shift)
    return max(0, min(i, q.e - 1))


def preimage_count(q: KummerQuery) -> int:
    return q.p ** preimage_exponent(q)


def interval_bounds(p: int, e: int, i: int) -> tuple:
    """Valuation interval ``(lo, hi, lo_closed, hi_closed)`` on which the exponent is ``i``."""
    _check_p(p)
    _check_e(e)
    if not 0 <= i <= e:
        raise ValuationError(f"exponent {i} outside 0..{e}")
    shift = Fraction(1, p - 1)
    if e == 0:
        return (Fraction(0), INF, True, True)
    if i == e:
        return (e + shift, INF, False, True)
    lo = Fraction(0) if i == 0 else i + shift
    hi = i + 1 + shift
    return (lo, hi, True, i + 1 == e)


def pullback_ball(p: int, v) -> tuple:
    """One step of ``z -> z**p`` above ``B(1, p**-v)``.

    Returns ``(splits, v')``: whether the ball has ``p`` preimages, and the
    valuation of the radius of each preimage ball.
    """
    _check_p(p)
    v = Val(v)
    if v < 0:
        raise ValuationError("ball radius must be at most 1")
    if v.is_inf:
        return True, v
    if v.value > Fraction(p, p - 1):
        return True, Val(v.value - 1)
    return False, Val(v.value / p)


def image_valuation(p: int, v) -> Val:
    """Radius valuation of the image of ``B(h, p**-v)``, ``|h| = 1``, under ``z -> z**p``."""
    _check_p(p)
    v = Val(v)
    if v.is_inf:
        return v
    return Val(min(p * v.value, v.value + 1))
