"""Defects of the nested identity at the right endpoint: ``a(f(n)) = n + 1``."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO

import numpy as np

from .beatty import BeattyParams, beatty_array, theta_in
from .errors import InternalConsistencyError, UsageError
from .golomb import window_sums
from .nested import interval_endpoints
from .qfield import QuadExpr
from .report import VerifyReport
from .words import balance, encode, factor_sets, incidence_matrix, iterate_morphism

GAP_ALPHABET = {2: (3, 4, 7), 3: (7, 12, 19)}
GAP_SUBSTITUTION = {3: (3, 4), 4: (3, 7), 7: (3, 7, 7)}


def defect_params(r: int) -> BeattyParams:
    if r not in GAP_ALPHABET:
        raise UsageError("defect sets are implemented for r = 2 and r = 3")
    return BeattyParams(r, interval_endpoints(r)[1])


@dataclass
class DefectSet:
    r: int
    elements: np.ndarray
    cap: int
    counters: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.elements)

    def density(self) -> float:
        return len(self.elements) / self.cap


def _c(r: int) -> QuadExpr:
    return QuadExpr(0, Fraction(1, r), r)


def return_window(r: int = 2) -> tuple[QuadExpr, QuadExpr]:
    """``J = [1 - c, 1/2]``: defects are exactly the n with ``theta_{n-1}`` in J."""
    if r != 2:
        raise UsageError("return window is known for r = 2 only")
    c = _c(2)
    return 1 - c, QuadExpr(Fraction(1, 2), 0, 2)


def compute_defects(r: int, cap: int) -> DefectSet:
    """All ``r <= n <= cap`` with ``a(f(n)) = n + 1``; for r = 2 also checks the return-time criterion."""
    if cap < 10:
        raise UsageError("cap must be >= 10")
    p = defect_params(r)
    a = beatty_array(p, 0, cap + 1)
    ns = np.arange(r, cap + 1)
    f = window_sums(a, r, r, cap)
    big = beatty_array(p, 0, int(f.max()) + 1)
    af = big[f]
    delta = af - ns
    if np.any((delta != 0) & (delta != 1)):
        bad = int(ns[np.flatnonzero((delta != 0) & (delta != 1))[0]])
        raise InternalConsistencyError(f"a(f(n)) - n outside {{0, 1}} at n={bad}")
    mask = delta == 1
    elements = ns[mask]
    counters: dict = {}
    # absorption: a(a(f(n))) = a(n + 1) = a(n) at each defect
    absorbed = (big[af[mask]] == a[elements]) & (a[elements + 1] == a[elements])
    counters["absorption_failures"] = int(np.sum(~absorbed))
    if r == 2:
        lo, hi = return_window(2)
        inside = theta_in(p, ns - 1, lo, hi)
        counters["return_time_exceptions"] = int(np.sum(inside != mask))
        hits = sum(int(np.sum(theta_in(p, ns - 1, x, x))) for x in (lo, hi))
        counters["endpoint_hits"] = hits
        if counters["return_time_exceptions"] or hits:
            raise InternalConsistencyError(f"return-time criterion broken: {counters}")
    if counters["absorption_failures"]:
        raise InternalConsistencyError(f"defect not absorbed: {counters}")
    return DefectSet(r, elements, cap, counters)


@dataclass
class GapWord:
    r: int
    letters: np.ndarray

    @property
    def counts(self) -> dict[int, int]:
        vals, cnt = np.unique(self.letters, return_counts=True)
        return {int(v): int(k) for v, k in zip(vals, cnt)}

    @property
    def frequencies(self) -> dict[int, Fraction]:
        total = len(self.letters)
        return {k: Fraction(v, total) for k, v in self.counts.items()}

    def text(self) -> str:
        return encode(self.letters.tolist(), GAP_ALPHABET[self.r])


def gap_word(ds: DefectSet) -> GapWord:
    if len(ds.elements) < 2:
        raise UsageError("need at least two defects")
    gaps = np.diff(ds.elements)
    alphabet = GAP_ALPHABET[ds.r]
    outside = sorted(set(np.unique(gaps).tolist()) - set(alphabet))
    if outside:
        raise InternalConsistencyError(f"gap(s) {outside} outside alphabet {alphabet}")
    if ds.r == 2:
        idx = np.flatnonzero(gaps == 4)
        interior = idx[(idx > 0) & (idx < len(gaps) - 1)]
        if np.any(gaps[interior - 1] != 3) or np.any(gaps[interior + 1] != 3):
            raise InternalConsistencyError("a gap 4 is not framed by 3's")
    return GapWord(ds.r, gaps)


@dataclass(frozen=True)
class Interval:
    left: QuadExpr
    right: QuadExpr
    closed: tuple[bool, bool]

    @property
    def length(self) -> QuadExpr:
        return self.right - self.left

    def contains(self, x: QuadExpr) -> bool:
        lo = self.left < x or (self.closed[0] and x == self.left)
        hi = x < self.right or (self.closed[1] and x == self.right)
        return lo and hi


def return_intervals() -> dict[int, Interval]:
    """Sub-windows of J sorted by the gap to the next defect."""
    c = _c(2)
    half = QuadExpr(Fraction(1, 2), 0, 2)
    a, b = Fraction(5, 2) - 3 * c, 4 - 5 * c
    J = {3: Interval(1 - c, a, (True, True)),
         7: Interval(a, b, (False, True)),
         4: Interval(b, half, (False, True))}
    total = sum((iv.length for iv in J.values()), QuadExpr(0, 0, 2))
    if total != c - Fraction(1, 2):
        raise InternalConsistencyError("sub-windows do not partition J")
    return J


def classify_returns(ds: DefectSet) -> VerifyReport:
    """Each defect ``n`` (but the last) has ``theta_{n-1}`` in the sub-window of its next gap."""
    if ds.r != 2:
        raise UsageError("return intervals are for r = 2")
    p = defect_params(2)
    J = return_intervals()
    el = ds.elements[:-1]
    gaps = np.diff(ds.elements)
    bad = None
    for g, iv in J.items():
        inside = theta_in(p, el - 1, iv.left, iv.right, iv.closed)
        wrong = np.flatnonzero(inside != (gaps == g))
        if len(wrong):
            i = int(wrong[0])
            if bad is None or el[i] < bad["n"]:
                bad = {"n": int(el[i]), "gap": int(gaps[i]), "window": g}
    return VerifyReport("return intervals", bad is None, len(el), bad)


def gap_frequencies(gw: GapWord) -> dict:
    """Empirical letter frequencies and mean gap beside the exact targets."""
    if len(gw.letters) < 100:
        raise UsageError("need at least 100 gaps")
    freqs = {k: float(v) for k, v in gw.frequencies.items()}
    mean = float(np.mean(gw.letters))
    out = {"frequencies": freqs, "mean_gap": mean}
    if gw.r == 2:
        s2 = 2 ** 0.5
        targets = {3: s2 - 1, 4: 3 - 2 * s2, 7: s2 - 1}
        out["targets"] = targets
        out["deviation"] = {k: freqs.get(k, 0.0) - t for k, t in targets.items()}
        out["mean_target"] = 2 * (s2 + 1)
    return out


def _char_poly_3(M: np.ndarray) -> tuple[int, int, int, int]:
    """Integer coefficients of ``det(lambda I - M)``, highest degree first."""
    M = [[int(x) for x in row] for row in M]
    tr = M[0][0] + M[1][1] + M[2][2]
    minors = sum(M[i][i] * M[j][j] - M[i][j] * M[j][i] for i in range(3) for j in range(i + 1, 3))
    det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
           - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
           + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
    return 1, -tr, minors, -det


def perron_frequencies(M: np.ndarray, lam: QuadExpr) -> list[QuadExpr]:
    """Right eigenvector of ``M`` for ``lam``, normalized to sum 1 (exact)."""
    A = [[QuadExpr(int(M[i][j]), 0, lam.radicand) - (lam if i == j else 0) for j in range(3)] for i in range(3)]
    r0, r1 = A[0], A[1]
    v = [r0[1] * r1[2] - r0[2] * r1[1], r0[2] * r1[0] - r0[0] * r1[2], r0[0] * r1[1] - r0[1] * r1[0]]
    if all(x == 0 for x in v):
        r1 = A[2]
        v = [r0[1] * r1[2] - r0[2] * r1[1], r0[2] * r1[0] - r0[0] * r1[2], r0[0] * r1[1] - r0[1] * r1[0]]
    for i in range(3):
        if sum((A[i][j] * v[j] for j in range(3)), QuadExpr(0, 0, lam.radicand)) != 0:
            raise InternalConsistencyError("not an eigenvector")
    s = v[0] + v[1] + v[2]
    return [x / s for x in v]


def substitution_check(gw: GapWord, max_factor_len: int = 20) -> VerifyReport:
    """Every factor of the gap word up to ``max_factor_len`` occurs in a long iterate of the substitution.

    Also checks primitivity (``M^2 > 0``), the characteristic polynomial and the
    exact Perron frequencies.
    """
    if gw.r != 2:
        raise UsageError("the substitution is stated for r = 2")
    alphabet = GAP_ALPHABET[2]
    M = incidence_matrix(GAP_SUBSTITUTION, alphabet)
    problems: dict = {}
    if not np.all(M @ M > 0):
        problems["primitive"] = (M @ M).tolist()
    poly = _char_poly_3(M)
    if poly != (1, -3, 1, 1):
        problems["char_poly"] = poly
    lam = QuadExpr(1, 1, 2)
    freqs = perron_frequencies(M, lam)
    target = [QuadExpr(-1, 1, 2), QuadExpr(3, -2, 2), QuadExpr(-1, 1, 2)]
    if freqs != target:
        problems["perron"] = [str(x) for x in freqs]
    text = gw.text()
    word, k = iterate_morphism(GAP_SUBSTITUTION, 3, 10 * len(text))
    big = encode(word, alphabet)
    missing = None
    fs = factor_sets(text, max_factor_len)
    checked = 0
    for ell in range(1, max_factor_len + 1):
        for u in sorted(fs[ell]):
            checked += 1
            if big.find(u) < 0:
                missing = u
                break
        if missing:
            dec = dict(zip("abc", map(str, alphabet)))
            problems["counterexample"] = ",".join(dec[ch] for ch in missing)
            break
    return VerifyReport(f"substitution L={max_factor_len}", not problems, checked, problems or None,
                        {"iterations": k, "subshift_length": len(big), "char_poly": poly,
                         "distinct_factors_L": len(fs[max_factor_len])})


@dataclass
class SLWord:
    bits: np.ndarray        # 1 = L (gap 7), 0 = S (gap 3 or 4)

    def text(self) -> str:
        return "".join("L" if b else "S" for b in self.bits)


def coarsen_SL(gw: GapWord, max_len: int = 30) -> tuple[SLWord, dict]:
    """Merge 3 and 4 into S, keep 7 as L; report frequencies and balance (diagnostic only)."""
    if gw.r != 2:
        raise UsageError("S/L coarsening is for r = 2")
    bits = (gw.letters == 7).astype(np.int8)
    nL = int(bits.sum())
    n = len(bits)
    s2 = 2 ** 0.5
    report = {"freq_S": Fraction(n - nL, n), "freq_L": Fraction(nL, n),
              "target_S": 2 - s2, "target_L": s2 - 1,
              "balance": balance(bits, min(max_len, n))}
    report["balanced"] = all(v <= 1 for v in report["balance"].values())
    return SLWord(bits), report


def transition_report(gw: GapWord) -> dict:
    """Letter and two-letter counts of a gap word (no substitution asserted)."""
    letters = gw.letters.tolist()
    pairs = Counter(zip(letters, letters[1:]))
    return {"letters": gw.counts, "pairs": {f"{a},{b}": v for (a, b), v in sorted(pairs.items())},
            "followers": {a: sorted({b for (x, b) in pairs if x == a}) for a in GAP_ALPHABET[gw.r]}}


def export_bfiles(ds: DefectSet, defects_out: IO[str], gaps_out: IO[str] | None = None):
    from .oeis import render_bfile
    defects_out.write(render_bfile(ds.elements.tolist(), offset=1))
    if gaps_out is not None:
        gaps_out.write(render_bfile(np.diff(ds.elements).tolist(), offset=1))
