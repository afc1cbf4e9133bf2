from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from almost_golomb.beatty import (BeattyParams, affine_residual, beatty_array, continuous_solution,
                                  difference_word, multiplicity, sturmian_morphism_check, theta, theta_in)
from almost_golomb.errors import UsageError
from almost_golomb.qfield import QuadExpr, floor_quad
from almost_golomb.words import balance, morphism_lengths
from oracles import beatty, canonical_r2

BEATTY_R2 = [1, 2, 2, 3, 4, 4, 5, 6, 7, 7, 8, 9, 9, 10, 11, 12, 12, 13, 14, 14]

shift_parts = st.tuples(st.fractions(-3, 3, max_denominator=50), st.fractions(-2, 2, max_denominator=50))


def test_canonical_listing():
    p = BeattyParams.canonical(2)
    assert [p(n) for n in range(1, 21)] == BEATTY_R2
    assert p(12) == 9 and p(1) == 1 and p(0) == 0 and p(-5) == 0
    assert BeattyParams.canonical(5)(5) == 3
    assert list(p.values(20)[1:]) == BEATTY_R2


def test_c_squared():
    for r in (2, 3, 7, 10):
        c = BeattyParams.canonical(r).c
        assert c * c * r == 1


def test_canonical_equals_shifted_wall_column():
    a = beatty_array(BeattyParams.canonical(2), 1, 10_000)
    assert all(int(a[n - 1]) == canonical_r2(n) for n in range(1, 10_001))
    wall = [floor_quad(QuadExpr(0, Fraction(m, 2), 2)) for m in range(2, 10_002)]
    assert a.tolist() == wall


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 40), shift_parts, st.integers(-50, 5000))
def test_eval_against_oracle(r, d, n):
    p = BeattyParams(r, QuadExpr(d[0], d[1], r))
    assert p(n) == beatty(r, d[0], d[1], n)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), shift_parts, st.integers(-20, 10**6))
def test_array_matches_scalar(r, d, lo):
    p = BeattyParams(r, QuadExpr(d[0], d[1], r))
    arr = beatty_array(p, lo, lo + 200)
    assert arr.tolist() == [p(n) for n in range(lo, lo + 201)]


def test_array_exact_at_integer_hits():
    # d rational makes cn + d an integer at n = 0 and at no other n; also test huge n
    p = BeattyParams(2, QuadExpr(3, 0, 2))
    assert beatty_array(p, 10**12, 10**12 + 50).tolist() == [p(n) for n in range(10**12, 10**12 + 51)]


def test_theta_decomposition_and_rotation():
    p = BeattyParams.canonical(2)
    c = p.c
    for n in range(1, 300):
        t = theta(p, n)
        assert 0 <= t < 1
        assert t + p(n) == p.real(n)
        step = theta(p, n + 1) - t
        assert step == c or step == c - 1
        assert (t < 1 - c) == (p(n + 1) == p(n))


def test_theta_in_matches_exact():
    p = BeattyParams(2, QuadExpr(-2, 2, 2))
    c = p.c
    ns = np.arange(1, 3000)
    lo, hi = 1 - c, QuadExpr(Fraction(1, 2), 0, 2)
    fast = theta_in(p, ns, lo, hi)
    slow = [lo <= theta(p, int(n)) <= hi for n in ns]
    assert fast.tolist() == slow


def test_difference_word():
    w = difference_word(BeattyParams.canonical(2), 100_000)
    assert w[:12].tolist() == [1, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1, 0]
    assert set(np.unique(w).tolist()) == {0, 1}
    text = "".join(map(str, w.tolist()))
    assert "00" not in text
    assert max(balance(w, 30).values()) <= 1
    w3 = difference_word(BeattyParams.canonical(3), 1000)
    p3 = BeattyParams.canonical(3)
    assert int(w3.sum()) == p3(1001) - p3(1)
    with pytest.raises(UsageError):
        difference_word(BeattyParams.canonical(2), 0)


def test_multiplicity():
    p = BeattyParams.canonical(2)
    assert multiplicity(p, 2) == 2
    assert multiplicity(p, 8) == 1
    assert multiplicity(p, 9) == 2
    c = p.c
    counts = np.bincount(beatty_array(p, 1, 5000))
    for v in range(2, 3000):
        m = multiplicity(p, v)
        assert m == counts[v] and m in (1, 2)
        first = int(np.searchsorted(beatty_array(p, 0, 5000), v))
        assert (m == 2) == (theta(p, first) < 1 - c)


def test_morphism_lengths_recurrence():
    from almost_golomb.beatty import STURMIAN_MORPHISM
    lengths = morphism_lengths(STURMIAN_MORPHISM, 0, 8)
    # this morphism has matrix [[1,1],[1,2]]; its lengths obey x_{k+1} = 3x_k - x_{k-1}
    assert lengths == [1, 2, 5, 13, 34, 89, 233, 610]


def test_morphism_check_trivial_length():
    assert sturmian_morphism_check(1000, max_factor_len=1).passed


def test_continuous_solution():
    for r in (2, 3, 5, 12):
        slope, intercept = continuous_solution(r)
        lin, const = affine_residual(r, slope, intercept)
        assert lin == 0 and const == 0
        assert intercept * (QuadExpr.sqrt(r) + 1) == Fraction(r - 1, 2)
    s, i = continuous_solution(2)
    assert s == QuadExpr(0, Fraction(1, 2), 2) and i == QuadExpr(Fraction(-1, 2), Fraction(1, 2), 2)
