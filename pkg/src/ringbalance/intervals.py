"""Closed-interval and two-piece multi-interval algebra.

Intervals are closed ``[lo, hi]`` with double-precision endpoints and no
outward rounding (tolerances elsewhere absorb ulp noise). The empty set is a
first-class value, represented by ``None`` for plain intervals and by the
empty tuple for multi-intervals. A multi-interval is an ordered tuple of at
most two disjoint pieces sorted by lower endpoint; pieces that touch are
merged into one.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Optional


class Interval(NamedTuple):
    lo: float
    hi: float


# A multi-interval is a tuple of 0, 1 or 2 disjoint Intervals sorted by lo.
MultiInterval = tuple  # tuple[Interval, ...]

EMPTY_MULTI: MultiInterval = ()


class MoreThanTwoPiecesError(ValueError):
    """An operation produced more than two disjoint pieces.

    The balancing protocol only ever manipulates sets made of one negative
    and one positive piece, so a third piece signals a malformed operand.
    """


class EmptyHullError(ValueError):
    """Hull requested for an empty multi-interval (estimator inconsistency)."""


def make(lo: float, hi: float) -> Interval:
    """Construct a validated non-empty interval."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
    if lo > hi:
        raise ValueError(f"interval lower endpoint exceeds upper: [{lo}, {hi}]")
    return Interval(lo, hi)


def width(iv: Optional[Interval]) -> float:
    return 0.0 if iv is None else iv.hi - iv.lo


def minkowski_sum(a: Optional[Interval], b: Optional[Interval]) -> Optional[Interval]:
    """Elementwise set sum; empty absorbs everything."""
    if a is None or b is None:
        return None
    return Interval(a.lo + b.lo, a.hi + b.hi)


def intersect(a: Optional[Interval], b: Optional[Interval]) -> Optional[Interval]:
    if a is None or b is None:
        return None
    lo = a.lo if a.lo >= b.lo else b.lo
    hi = a.hi if a.hi <= b.hi else b.hi
    if lo > hi:
        return None
    return Interval(lo, hi)


def negate(a: Optional[Interval]) -> Optional[Interval]:
    if a is None:
        return None
    return Interval(-a.hi, -a.lo)


def contains(a: Optional[Interval], x: float) -> bool:
    return a is not None and a.lo <= x <= a.hi


def multi(pieces: Iterable[Optional[Interval]]) -> MultiInterval:
    """Normalize pieces: drop empties, sort, merge touching/overlapping.

    Raises MoreThanTwoPiecesError if more than two disjoint pieces remain.
    """
    kept = sorted(p for p in pieces if p is not None)
    merged: list[Interval] = []
    for p in kept:
        if merged and p.lo <= merged[-1].hi:
            last = merged[-1]
            if p.hi > last.hi:
                merged[-1] = Interval(last.lo, p.hi)
        else:
            merged.append(p)
    if len(merged) > 2:
        raise MoreThanTwoPiecesError(f"{len(merged)} disjoint pieces: {merged}")
    return tuple(merged)


def hull(s: MultiInterval) -> Interval:
    """Smallest single interval containing every piece."""
    if not s:
        raise EmptyHullError("hull of the empty set is undefined")
    return Interval(s[0].lo, s[-1].hi)


def multi_intersect(s: MultiInterval, t: MultiInterval) -> MultiInterval:
    """Pairwise piece intersections, renormalized.

    Fragments come out ordered because both operands are ordered and have
    disjoint pieces, so a single merge pass suffices.
    """
    if not s or not t:
        return EMPTY_MULTI
    frags: list[Interval] = []
    for p in s:
        for q in t:
            lo = p.lo if p.lo >= q.lo else q.lo
            hi = p.hi if p.hi <= q.hi else q.hi
            if lo <= hi:
                if frags and lo <= frags[-1].hi:
                    last = frags[-1]
                    if hi > last.hi:
                        frags[-1] = Interval(last.lo, hi)
                else:
                    frags.append(Interval(lo, hi))
    if len(frags) > 2:
        raise MoreThanTwoPiecesError(f"{len(frags)} disjoint pieces: {frags}")
    return tuple(frags)


def multi_sum(s: MultiInterval, a: Interval) -> MultiInterval:
    """Minkowski sum applied piecewise; shifted pieces that meet are merged."""
    if not s:
        return EMPTY_MULTI
    if len(s) == 1:
        p = s[0]
        return (Interval(p.lo + a.lo, p.hi + a.hi),)
    out: list[Interval] = []
    for p in s:
        lo = p.lo + a.lo
        hi = p.hi + a.hi
        if out and lo <= out[-1].hi:
            last = out[-1]
            if hi > last.hi:
                out[-1] = Interval(last.lo, hi)
        else:
            out.append(Interval(lo, hi))
    return tuple(out)


def multi_contains(s: MultiInterval, x: float) -> bool:
    for p in s:
        if p.lo <= x <= p.hi:
            return True
    return False
