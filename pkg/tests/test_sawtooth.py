import io
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from almost_golomb.errors import UsageError
from almost_golomb.golomb import verify_strong
from almost_golomb.beatty import BeattyParams
from almost_golomb.qfield import QuadExpr
from almost_golomb.sawtooth import (count_N, hermite_grouping, is_square, parity_identities, phi,
                                    phi_band_check, profile, profile_invariants, square_closed_form,
                                    table1, write_table1_csv)

NONSQUARE = [r for r in range(2, 201) if not is_square(r)]

# r: (N, bound, margin, sup, inf) as printed to 4 places
TABLE = {
    2: (0, "0.8284", "0.8284", "1.7071", "0.2929"),
    3: (2, "2.1962", "0.1962", "2.2679", "0.7321"),
    5: (0, "2.1803", "2.1803", "3.4721", "1.5279"),
    6: (3, "3.6969", "0.6969", "3.8763", "2.1237"),
    7: (4, "5.5203", "1.5203", "4.3542", "2.6458"),
    8: (7, "7.6274", "0.6274", "5.1005", "2.8995"),
}


@pytest.mark.parametrize("r", sorted(TABLE))
def test_table_rows(r):
    row = profile(r).row()
    assert (row["N"], row["bound"], row["margin"], row["sup_phi"], row["inf_phi"]) == TABLE[r]


def test_count_N_examples():
    assert count_N(3) == 2 and count_N(5) == 0 and count_N(8) == 7
    assert [r for r in range(2, 40) if not is_square(r) and count_N(r) == 0] == [2, 5, 10, 17, 26, 37]
    with pytest.raises(UsageError):
        count_N(9)


@pytest.mark.parametrize("r", NONSQUARE)
def test_identities_and_invariants(r):
    rep = parity_identities(r)
    assert rep.passed, rep.summary()
    p = profile(r)
    inv = profile_invariants(p)
    assert inv.passed, inv.summary()
    assert p.sup_phi + p.inf_phi == r
    assert 1 <= p.t <= 2 * p.s
    assert p.u == (p.t - 1) // 2


def test_parity_examples():
    assert parity_identities(7).counters["N"] == 4
    assert parity_identities(10).counters["N"] == 0
    rep = parity_identities(2)
    assert rep.counters["pairing"] == 0


def test_partial_sums_bound_breaks_from_8():
    # |P(j)| < 1 is not a theorem: it fails first at r = 8
    fails = [r for r in NONSQUARE if not profile_invariants(profile(r)).counters["partial_bound_holds"]]
    assert fails[0] == 8


def test_phi_values():
    lo, hi = QuadExpr(Fraction(1), Fraction(-1, 2), 2), QuadExpr(Fraction(1), Fraction(1, 2), 2)
    for n in range(2, 500):
        assert lo < phi(2, n) < hi
    for n in range(3, 300):
        v = phi(3, n)
        assert QuadExpr(-1, 1, 3) <= v <= QuadExpr(4, -1, 3)


@pytest.mark.parametrize("r", [r for r in NONSQUARE if r <= 60] + [199])
def test_phi_band(r):
    assert phi_band_check(r, 10_000).passed


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(NONSQUARE[:30]), st.integers(0, 10**6))
def test_band_equivalent_to_strong_identity(r, n0):
    n = n0 + r
    p = BeattyParams.canonical(r)
    v = phi(r, n)
    in_band = QuadExpr(Fraction(r, 2), Fraction(-1, 2), r) < v <= QuadExpr(Fraction(r, 2), Fraction(1, 2), r)
    assert in_band == verify_strong(p, r, n, n).passed


def test_square_closed_forms():
    assert square_closed_form(3, 9) == (24, 9)
    assert square_closed_form(2, 4) == (8, 5)
    for s in range(2, 8):
        for n in range(s * s, s * s + 200):
            S, target = square_closed_form(s, n)
            assert target == n + (1 - s % 2)
            assert hermite_grouping(s, n)


def test_table_csv():
    buf = io.StringIO()
    write_table1_csv(table1(8), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("r,s,beta,N,bound,margin,sup_phi,inf_phi")
    assert lines[2].startswith("3,1,0.7321,2,2.1962,0.1962,2.2679,0.7321,True")
    assert len(lines) == 1 + 6
