import math
import pickle
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from almost_golomb.errors import UsageError
from almost_golomb.qfield import (QuadExpr, ceil_quad, floor_isqrt, floor_quad, floor_with_steps, frac,
                                  parse_quad, render, sign, to_decimal)
from oracles import decimal_value, floor_a_plus_b_sqrt

fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
nonsquare = st.integers(2, 500).filter(lambda r: math.isqrt(r) ** 2 != r)


def Q(a, b=0, r=2):
    return QuadExpr(a, b, r)


def test_add_examples():
    assert Q(1) + Q(0, 1) == Q(1, 1)
    assert Q(Fraction(1, 2), Fraction(1, 2)) + Q(Fraction(1, 2), Fraction(-1, 2)) == Q(1)
    assert Q(-2, 2) + Q(0) == Q(-2, 2)


def test_mul_examples():
    c = Q(0, Fraction(1, 2))
    assert c * c == Q(Fraction(1, 2))
    assert (4 * c - 2) * (2 * c + 1) == Q(2)
    x = Q(Fraction(3, 7), Fraction(-5, 11), 3)
    assert x * QuadExpr(1, 0, 3) == x


def test_radicand_mismatch():
    with pytest.raises(UsageError):
        Q(1, 1, 2) + Q(1, 1, 3)
    with pytest.raises(UsageError):
        Q(1, 1, 2) < Q(1, 1, 3)


def test_sign_examples():
    assert sign(Q(1, -1)) == -1
    assert sign(QuadExpr(0, 0, 3)) == 0
    s3 = QuadExpr.sqrt(3)
    assert sign((5 * s3 - 3) / 6 - s3 / 2) == 1


def test_floor_examples():
    assert floor_quad(Q(0, 1)) == 1
    assert floor_quad(Q(0, Fraction(13, 2)) + Q(0, Fraction(1, 2))) == 9
    assert floor_quad(QuadExpr(0, Fraction(1, 3), 3) + QuadExpr(0, Fraction(1, 2), 3)) == 1


def test_reduced_and_immutable():
    x = Q(Fraction(4, 6), Fraction(-10, 4))
    assert (x.rat.denominator, x.surd.denominator) == (3, 2)
    with pytest.raises(AttributeError):
        x.rat = 1
    assert pickle.loads(pickle.dumps(x)) == x


@settings(max_examples=10_000, deadline=None)
@given(fractions, fractions, nonsquare)
def test_floor_and_sign_random(a, b, r):
    x = QuadExpr(a, b, r)
    m = floor_quad(x)
    assert m == floor_a_plus_b_sqrt(a, b, r)
    assert x - m >= 0 and x - m - 1 < 0
    assert 0 <= frac(x) < 1
    exact = decimal_value(a, b, r)
    s = sign(x)
    assert s == (exact > 0) - (exact < 0)
    assert ceil_quad(x) == -floor_a_plus_b_sqrt(-a, -b, r)


@settings(max_examples=2_000, deadline=None)
@given(fractions, fractions, nonsquare)
def test_float_hint_within_two_steps(a, b, r):
    m, steps = floor_with_steps(QuadExpr(a, b, r))
    assert 0 <= steps <= 2
    assert m == floor_isqrt(QuadExpr(a, b, r))


@settings(max_examples=1_000, deadline=None)
@given(fractions, fractions, nonsquare, fractions, fractions)
def test_sign_multiplicative(a, b, r, c, d):
    x, y = QuadExpr(a, b, r), QuadExpr(c, d, r)
    assert sign(x * x) >= 0
    assert sign(x) * sign(y) == sign(x * y)


@settings(max_examples=1_000, deadline=None)
@given(fractions, fractions, st.integers(1, 40))
def test_square_radicand_matches_rational(a, b, s):
    x = QuadExpr(a, b, s * s)
    assert floor_quad(x) == math.floor(a + b * s)
    assert sign(x) == (a + b * s > 0) - (a + b * s < 0)


@settings(max_examples=500, deadline=None)
@given(fractions, fractions, nonsquare)
def test_render_parse_round_trip(a, b, r):
    x = QuadExpr(a, b, r)
    assert parse_quad(render(x), radicand=r) == x


@settings(max_examples=300, deadline=None)
@given(fractions.filter(lambda q: q != 0), fractions, nonsquare)
def test_inverse(a, b, r):
    x = QuadExpr(a, b, r)
    assert x * (1 / x) == 1


def test_parse_variants():
    assert parse_quad("7/10") == QuadExpr(Fraction(7, 10), 0, 2)
    assert parse_quad("sqrt(2)/2") == Q(0, Fraction(1, 2))
    assert parse_quad("-2/1 + 2/1*sqrt(2)") == Q(-2, 2)
    assert parse_quad("0/1+1/2*sqrt(3)") == QuadExpr(0, Fraction(1, 2), 3)
    for bad in ["0.7", "", "1+sqrt(2)+sqrt(3)", "abc"]:
        with pytest.raises(UsageError):
            parse_quad(bad)
    with pytest.raises(UsageError):
        parse_quad("sqrt(3)", radicand=2)


def test_to_decimal_half_up():
    assert to_decimal(Q(-2, 2)) == "0.8284"
    assert to_decimal(QuadExpr(Fraction(1, 2), Fraction(-1, 2), 2)) == "-0.2071"
    assert to_decimal(QuadExpr(Fraction(12345, 100000), 0, 2)) == "0.1235"


def test_pow_and_hash():
    x = Q(1, 1)
    assert x ** 2 - 2 * x - 1 == 0
    assert hash(QuadExpr(3, 0, 5)) == hash(Fraction(3))
    assert len({Q(1, 1), Q(1, 1), Q(1, 2)}) == 2
