import io
from fractions import Fraction

import numpy as np
import pytest

from almost_golomb.beatty import theta
from almost_golomb.defect import (GAP_SUBSTITUTION, DefectSet, GapWord, classify_returns, coarsen_SL,
                                  compute_defects, defect_params, export_bfiles, gap_frequencies, gap_word,
                                  perron_frequencies, return_intervals, return_window, substitution_check,
                                  transition_report)
from almost_golomb.errors import InternalConsistencyError, UsageError
from almost_golomb.oeis import parse_bfile
from almost_golomb.qfield import QuadExpr
from almost_golomb.words import incidence_matrix
from oracles import beatty

R2_LISTING = [6, 9, 13, 16, 23, 30, 33, 40, 47, 50, 54, 57, 64, 67, 71]
R3_LISTING = [16, 23, 42, 49, 61, 68, 87, 94, 113, 120]
S2 = QuadExpr.sqrt(2)


@pytest.fixture(scope="module")
def d2():
    return compute_defects(2, 200_000)


def _brute_defects(r, d_rat, d_surd, cap):
    a = lambda k: beatty(r, d_rat, d_surd, k)
    return [n for n in range(r, cap + 1) if a(sum(a(n - j) for j in range(r))) == n + 1]


def test_listings():
    assert compute_defects(2, 75).elements.tolist()[:15] == R2_LISTING
    assert compute_defects(2, 71).elements.tolist() == R2_LISTING
    assert compute_defects(3, 125).elements.tolist() == R3_LISTING


def test_against_oracle():
    assert compute_defects(2, 600).elements.tolist() == _brute_defects(2, Fraction(-2), Fraction(2), 600)
    assert compute_defects(3, 600).elements.tolist() == _brute_defects(3, Fraction(-1, 2), Fraction(5, 6), 600)


def test_cap_too_small():
    with pytest.raises(UsageError):
        compute_defects(2, 5)
    with pytest.raises(UsageError):
        compute_defects(5, 100)


def test_return_time_and_repeats(d2):
    assert d2.counters == {"absorption_failures": 0, "return_time_exceptions": 0, "endpoint_hits": 0}
    p = defect_params(2)
    lo, hi = return_window()
    for n in d2.elements[:500].tolist():
        assert lo <= theta(p, n - 1) <= hi
        assert p(n + 1) == p(n)
    assert abs(d2.density() - (np.sqrt(2) - 1) / 2) < 1e-3


def test_gap_word(d2):
    gw = gap_word(d2)
    assert gw.letters[:14].tolist() == [3, 4, 3, 7, 7, 3, 7, 7, 3, 4, 3, 7, 3, 4]
    assert set(gw.counts) == {3, 4, 7}
    assert gw.letters.min() >= 3
    g3 = gap_word(compute_defects(3, 10_000))
    assert g3.letters[:9].tolist() == [7, 19, 7, 12, 7, 19, 7, 19, 7]
    assert set(g3.counts) == {7, 12, 19}


def test_gap_word_rejects_foreign_letters():
    with pytest.raises(InternalConsistencyError):
        gap_word(DefectSet(2, np.array([6, 9, 14]), 20))
    with pytest.raises(InternalConsistencyError):
        gap_word(DefectSet(2, np.array([1, 8, 12, 19]), 20))
    with pytest.raises(UsageError):
        gap_word(DefectSet(2, np.array([6]), 20))


def test_return_intervals(d2):
    J = return_intervals()
    c = S2 / 2
    assert J[3].length == J[7].length == (3 - 2 * S2) / 2
    assert J[4].length == (5 * S2 - 7) / 2
    assert J[3].length + J[4].length + J[7].length == c - Fraction(1, 2)
    p = defect_params(2)
    assert J[3].contains(theta(p, 5))
    assert J[7].contains(theta(p, 15))
    assert classify_returns(d2).passed


def test_frequencies(d2):
    gw = gap_word(d2)
    fr = gap_frequencies(gw)
    assert all(abs(v) < 1e-2 for v in fr["deviation"].values())
    assert abs(fr["mean_gap"] - fr["mean_target"]) < 1e-2
    assert abs(fr["mean_gap"] * len(d2) / d2.cap - 1) < 1e-2
    with pytest.raises(UsageError):
        gap_frequencies(GapWord(2, gw.letters[:10]))


def test_substitution_matrix():
    M = incidence_matrix(GAP_SUBSTITUTION, (3, 4, 7))
    assert M.tolist() == [[1, 1, 1], [1, 0, 0], [0, 1, 2]]
    assert ((M @ M) > 0).all()
    f = perron_frequencies(M, QuadExpr(1, 1, 2))
    assert f == [S2 - 1, 3 - 2 * S2, S2 - 1]


def test_substitution_check():
    gw = gap_word(compute_defects(2, 100_000))
    rep = substitution_check(gw, 20)
    assert rep.passed, rep.witness
    assert rep.counters["char_poly"] == (1, -3, 1, 1)


def test_substitution_detects_counterexample():
    fake = GapWord(2, np.array([3, 4, 3, 7, 7, 3, 4, 4, 3] * 20))
    rep = substitution_check(fake, 6)
    assert not rep.passed and "counterexample" in rep.witness


def test_coarsening(d2):
    gw = gap_word(d2)
    sl, rep = coarsen_SL(GapWord(2, gw.letters[:14]), 10)
    assert sl.text() == "SSSLLSLLSSSLSS"
    sl, rep = coarsen_SL(gw)
    assert rep["freq_S"] + rep["freq_L"] == 1
    assert abs(float(rep["freq_S"]) - (2 - np.sqrt(2))) < 1e-2
    assert set(rep["balance"]) == set(range(1, 31))


def test_r3_density_and_transitions():
    d3 = compute_defects(3, 200_000)
    assert abs(d3.density() - (2 - np.sqrt(3)) / 3) < 1e-3
    rep = transition_report(gap_word(d3))
    assert rep["followers"][12] == [7] and rep["followers"][19] == [7]


def test_bfile_export():
    ds = compute_defects(2, 75)
    a, b = io.StringIO(), io.StringIO()
    export_bfiles(ds, a, b)
    assert parse_bfile(a.getvalue()).values()[:15] == R2_LISTING
    assert parse_bfile(b.getvalue()).entries[0] == (1, 3)
