"""Interval and multi-interval algebra: examples and randomized properties."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from ringbalance.intervals import (
    EMPTY_MULTI,
    EmptyHullError,
    Interval,
    MoreThanTwoPiecesError,
    contains,
    hull,
    intersect,
    make,
    minkowski_sum,
    multi,
    multi_contains,
    multi_intersect,
    multi_sum,
    negate,
    width,
)

PI = math.pi

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def iv(lo, hi):
    return Interval(lo, hi)


class TestMinkowskiSum:
    def test_scalar_shift(self):
        assert minkowski_sum(iv(1, 2), iv(0.5, 0.5)) == iv(1.5, 2.5)

    def test_identity_element(self):
        assert minkowski_sum(iv(0, 0), iv(-1, 3)) == iv(-1, 3)

    def test_width_additivity(self):
        assert minkowski_sum(iv(-1, 1), iv(-1, 1)) == iv(-2, 2)

    def test_empty_absorbs(self):
        assert minkowski_sum(None, iv(0, 1)) is None
        assert minkowski_sum(iv(0, 1), None) is None


class TestIntersect:
    def test_overlap(self):
        assert intersect(iv(0, 2), iv(1, 3)) == iv(1, 2)

    def test_disjoint(self):
        assert intersect(iv(0, 1), iv(2, 3)) is None

    def test_idempotent(self):
        a = iv(-0.4, 1.7)
        assert intersect(a, a) == a

    def test_touching_endpoints_closed(self):
        assert intersect(iv(0, 1), iv(1, 2)) == iv(1, 1)


class TestHull:
    def test_two_pieces(self):
        assert hull((iv(-3, -2), iv(1, 4))) == iv(-3, 4)

    def test_single_piece(self):
        assert hull((iv(1, 2),)) == iv(1, 2)

    def test_mixed(self):
        assert hull((iv(-0.5, 0), iv(0.2, 0.3))) == iv(-0.5, 0.3)

    def test_empty_errors(self):
        with pytest.raises(EmptyHullError):
            hull(EMPTY_MULTI)


class TestNegate:
    def test_band(self):
        assert negate(iv(0.08, 0.12)) == iv(-0.12, -0.08)

    def test_fixed_point(self):
        assert negate(iv(0, 0)) == iv(0, 0)

    def test_empty(self):
        assert negate(None) is None


class TestMultiIntersect:
    def test_two_band_refinement(self):
        s = (iv(-PI, -0.1), iv(0.1, PI))
        t = (iv(-0.12, -0.08), iv(0.08, 0.12))
        assert multi_intersect(s, t) == (iv(-0.12, -0.1), iv(0.1, 0.12))

    def test_single_piece_result(self):
        s = (iv(0.2, 0.4),)
        t = (iv(-0.3, -0.1), iv(0.1, 0.3))
        assert multi_intersect(s, t) == (iv(0.2, 0.3),)

    def test_disjoint_empty(self):
        assert multi_intersect((iv(0, 1),), (iv(2, 3),)) == EMPTY_MULTI

    def test_empty_operand(self):
        assert multi_intersect(EMPTY_MULTI, (iv(0, 1),)) == EMPTY_MULTI

    def test_three_pieces_rejected(self):
        s = (iv(0, 10), iv(20, 30))
        t = (iv(5, 22), iv(25, 40))
        with pytest.raises(MoreThanTwoPiecesError):
            multi_intersect(s, t)


class TestMultiSum:
    def test_piecewise_shift(self):
        s = (iv(-0.2, -0.1), iv(0.1, 0.2))
        assert multi_sum(s, iv(0, 0.05)) == (iv(-0.2, -0.05), iv(0.1, 0.25))

    def test_identity(self):
        s = (iv(-0.2, -0.1), iv(0.1, 0.2))
        assert multi_sum(s, iv(0, 0)) == s

    def test_pieces_merge(self):
        s = (iv(-0.06, -0.04), iv(0.04, 0.06))
        out = multi_sum(s, iv(-0.05, 0.05))
        assert out == (iv(-0.11, 0.11),)

    def test_empty(self):
        assert multi_sum(EMPTY_MULTI, iv(0, 1)) == EMPTY_MULTI


class TestNormalization:
    def test_sorting_and_merge(self):
        assert multi([iv(1, 2), iv(-1, 0.5)]) == (iv(-1, 0.5), iv(1, 2))
        assert multi([iv(0, 1), iv(1, 2)]) == (iv(0, 2),)

    def test_make_validates(self):
        with pytest.raises(ValueError):
            make(2.0, 1.0)
        with pytest.raises(ValueError):
            make(float("nan"), 1.0)


@given(st.tuples(finite, finite), st.tuples(finite, finite))
def test_sum_width_additivity_prop(a, b):
    x = iv(min(a), max(a))
    y = iv(min(b), max(b))
    s = minkowski_sum(x, y)
    assert abs(width(s) - (width(x) + width(y))) <= 4 * math.ulp(max(1.0, width(s)))


@given(st.tuples(finite, finite), st.tuples(finite, finite), st.floats(0, 1), st.floats(0, 1))
def test_sum_soundness_prop(a, b, ta, tb):
    x = iv(min(a), max(a))
    y = iv(min(b), max(b))
    px = x.lo + ta * (x.hi - x.lo)
    py = y.lo + tb * (y.hi - y.lo)
    s = minkowski_sum(x, y)
    slack = 4 * math.ulp(max(1.0, abs(px) + abs(py)))
    assert s.lo - slack <= px + py <= s.hi + slack


@given(st.tuples(finite, finite), st.tuples(finite, finite))
def test_intersection_contained_prop(a, b):
    x = iv(min(a), max(a))
    y = iv(min(b), max(b))
    r = intersect(x, y)
    if r is not None:
        assert r.lo >= x.lo and r.hi <= x.hi
        assert r.lo >= y.lo and r.hi <= y.hi


@given(st.tuples(finite, finite))
def test_negation_involution_prop(a):
    x = iv(min(a), max(a))
    assert negate(negate(x)) == x


def _random_protocol_shape(rng):
    """A sign-split two-piece set like the ones the estimator manipulates."""
    kind = rng.random()
    if kind < 0.4:
        lo1 = rng.uniform(-3.0, -0.1)
        hi1 = rng.uniform(lo1, -0.05)
        lo2 = rng.uniform(0.05, 3.0)
        hi2 = rng.uniform(lo2, 3.2)
        return (iv(lo1, hi1), iv(lo2, hi2))
    if kind < 0.8:
        b = rng.uniform(0.01, 3.0)
        return (iv(-b, b),)
    lo = rng.uniform(-3.0, 3.0)
    return (iv(lo, lo + rng.uniform(0, 0.5)),)


def test_multi_intersect_commutative_idempotent_bulk():
    rng = random.Random(2024)
    for _ in range(20_000):
        s = _random_protocol_shape(rng)
        t = _random_protocol_shape(rng)
        st_ = multi_intersect(s, t)
        ts = multi_intersect(t, s)
        assert st_ == ts
        assert multi_intersect(s, s) == s
        for p in st_:
            assert hull(st_).lo <= p.lo and p.hi <= hull(st_).hi


def test_hull_contains_pieces_bulk():
    rng = random.Random(7)
    for _ in range(20_000):
        s = _random_protocol_shape(rng)
        h = hull(s)
        for p in s:
            assert h.lo <= p.lo and p.hi <= h.hi
        x = rng.uniform(-3.5, 3.5)
        if multi_contains(s, x):
            assert contains(h, x)
