"""Thin helpers over ``mpmath.iv`` for outward-rounded interval enclosures."""

import math
from contextlib import contextmanager

from mpmath import iv, mp, mpf

WORK_PREC = 192


def ival(lo, hi=None):
    if hi is None:
        hi = lo
    return iv.mpf([lo, hi])


def lo(x) -> mpf:
    return mp.mpf(x.a)


def hi(x) -> mpf:
    return mp.mpf(x.b)


def mid(x) -> mpf:
    return mp.mpf(x.mid)


def width(x) -> mpf:
    return mp.mpf(x.delta)


def contains(x, v) -> bool:
    return lo(x) <= v <= hi(x)


def contains_zero(x) -> bool:
    return lo(x) <= 0 <= hi(x)


def certainly_ge(a, b) -> bool:
    """lower(a) >= upper(b): the only way an interval comparison counts as decided."""
    return lo(a) >= hi(b)


def certainly_lt(a, b) -> bool:
    return hi(a) < lo(b)


def hull(a, b):
    return iv.mpf([min(lo(a), lo(b)), max(hi(a), hi(b))])


def as_float_pair(x) -> tuple[float, float]:
    # outward: the float nearest-rounding may shrink by half an ulp
    a, b = float(lo(x)), float(hi(x))
    return math.nextafter(a, -math.inf), math.nextafter(b, math.inf)


def pow2(e: int):
    """Exact 2**e as an mpf, for exponents far outside the float range."""
    return mp.ldexp(mp.mpf(1), e)


@contextmanager
def workprec(bits: int):
    """Set the working precision of both the point and the interval contexts."""
    old_mp, old_iv = mp.prec, iv.prec
    mp.prec = iv.prec = bits
    try:
        yield
    finally:
        mp.prec, iv.prec = old_mp, old_iv
