import io

import pytest
from hypothesis import given, settings, strategies as st

from almost_golomb.errors import OstrowskiError, UsageError
from almost_golomb.ostrowski import (choose_convention, continued_fraction, digit_bounds, digit_swap_check,
                                     pell_constants, table_for, table_invariants, to_ostrowski,
                                     uniqueness_check, valid_digits, write_swap_csv)
from oracles import canonical_r2, continued_fraction_inv_sqrt

NONSQUARE = [r for r in range(2, 60) if int(r ** 0.5) ** 2 != r]


def test_pell_denominators():
    t = continued_fraction(2, 10)
    assert t.a[:6] == (0, 1, 2, 2, 2, 2)
    assert t.q[1:9] == (1, 3, 7, 17, 41, 99, 239, 577)
    assert t.p[:5] == (0, 1, 2, 5, 12)


def test_r3_expansion():
    t = continued_fraction(3, 8)
    assert t.a == (0, 1, 1, 2, 1, 2, 1, 2)
    i = t.q.index(7)
    assert t.q[i + 1] == 19


@pytest.mark.parametrize("r", NONSQUARE)
def test_quotients_against_oracle(r):
    t = continued_fraction(r, 12)
    assert list(t.a) == continued_fraction_inv_sqrt(r, 12)
    assert table_invariants(t).passed


def test_single_digit_at_q():
    t = table_for(10_000)
    for k in range(1, t.depth - 1):
        if t.q[k] > 10_000:
            break
        rep = to_ostrowski(t.q[k], t)
        assert rep.value(t) == t.q[k] and sum(rep.digits) == 1


def test_round_trip_10k():
    t = table_for(10_000)
    for n in range(1, 10_001):
        rep = to_ostrowski(n, t)
        assert rep.value(t) == n
        assert valid_digits(rep.digits, t, "standard")
    assert to_ostrowski(10, t).value(t) == 10


def test_uniqueness():
    assert uniqueness_check(1000, "standard").passed
    assert uniqueness_check(400, "standard", r=3).passed
    lit = uniqueness_check(1000, "literal")
    assert not lit.passed and lit.witness["n"] == 2 and lit.counters["unrepresentable"] > 0


def test_literal_convention_fails_at_2():
    t = table_for(100)
    with pytest.raises(OstrowskiError):
        to_ostrowski(2, t, "literal")
    with pytest.raises(UsageError):
        digit_bounds(continued_fraction(3, 6), "literal")


def test_digit_swap():
    rep = digit_swap_check(10_000)
    assert rep.passed and rep.counters["pass_rate"] == 1.0
    conv, rep = choose_convention(2000)
    assert conv == "standard" and rep.passed
    t = table_for(1000)
    for k in range(1, 8):
        assert canonical_r2(t.q[k]) == t.p[k]
    assert canonical_r2(1) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**15))
def test_digit_swap_large(n):
    t = table_for(n)
    rep = to_ostrowski(n, t)
    assert rep.value(t) == n
    assert rep.swapped(t) == canonical_r2(n)


def test_pell_constants():
    rep = pell_constants()
    assert rep.passed, rep.witness
    assert rep.counters["wall"] == [0, 1, 2, 2, 3, 4, 4, 5, 6, 7]


def test_swap_csv():
    buf = io.StringIO()
    write_swap_csv(12, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,digits,sum_e_p,a_B,match"
    assert lines[12] == "12,1120,9,9,1"
