"""Continued fraction of ``1/sqrt(r)``, Ostrowski numeration, and the digit-swap rule for the canonical Beatty sequence."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO

import numpy as np

from .beatty import BeattyParams, beatty_array
from .errors import OstrowskiError, UsageError
from .qfield import QuadExpr, floor_quad
from .report import VerifyReport

CONVENTIONS = ("standard", "literal")


@dataclass(frozen=True)
class ConvergentTable:
    r: int
    a: tuple      # a_0, a_1, ...
    p: tuple      # p_0, p_1, ...
    q: tuple      # q_0, q_1, ...

    @property
    def depth(self) -> int:
        return len(self.a)

    def eps(self, k: int) -> QuadExpr:
        """Signed error ``c q_k - p_k``."""
        return QuadExpr(0, Fraction(self.q[k], self.r), self.r) - self.p[k]


def continued_fraction(r: int, depth: int) -> ConvergentTable:
    """Partial quotients and convergents of ``1/sqrt(r)``, computed exactly."""
    if r < 2 or math.isqrt(r) ** 2 == r:
        raise UsageError(f"r must be a non-square integer >= 2, got {r}")
    if depth < 2:
        raise UsageError("depth must be >= 2")
    x = QuadExpr(0, Fraction(1, r), r)
    a = []
    for _ in range(depth):
        ak = floor_quad(x)
        a.append(ak)
        x = 1 / (x - ak)
    p = [a[0], a[1] * a[0] + 1]
    q = [1, a[1]]
    for k in range(2, depth):
        p.append(a[k] * p[-1] + p[-2])
        q.append(a[k] * q[-1] + q[-2])
    return ConvergentTable(r, tuple(a), tuple(p), tuple(q))


def table_for(n_max: int, r: int = 2) -> ConvergentTable:
    depth = 4
    while True:
        t = continued_fraction(r, depth)
        if t.q[-2] > n_max:
            return t
        depth *= 2


def table_invariants(t: ConvergentTable) -> VerifyReport:
    """Recurrences, alternating signs and shrinking errors of the convergents."""
    problems = []
    for k in range(2, t.depth):
        if t.q[k] != t.a[k] * t.q[k - 1] + t.q[k - 2] or t.p[k] != t.a[k] * t.p[k - 1] + t.p[k - 2]:
            problems.append(f"recurrence at k={k}")
    eps = [t.eps(k) for k in range(t.depth)]
    for k, e in enumerate(eps):
        if e == 0 or (e > 0) != (k % 2 == 0):
            problems.append(f"sign at k={k}")
    for k in range(1, t.depth):
        if not abs(eps[k]) < abs(eps[k - 1]):
            problems.append(f"monotonicity at k={k}")
    return VerifyReport(f"convergents r={t.r}", not problems, t.depth, {"problems": problems[:5]} if problems else None)


@dataclass(frozen=True)
class OstrowskiDigits:
    n: int
    digits: tuple     # digits[k] multiplies q_k
    convention: str

    def value(self, t: ConvergentTable) -> int:
        return sum(e * t.q[k] for k, e in enumerate(self.digits))

    def swapped(self, t: ConvergentTable) -> int:
        return sum(e * t.p[k] for k, e in enumerate(self.digits))

    def text(self) -> str:
        top = max((k for k, e in enumerate(self.digits) if e), default=0)
        return "".join(str(self.digits[k]) for k in range(top, -1, -1))


def digit_bounds(t: ConvergentTable, convention: str) -> list[int]:
    """Largest allowed digit on each ``q_k``.

    ``standard``: ``a_1 - 1`` on ``q_0`` and ``a_{k+1}`` on ``q_k``.
    ``literal`` (r = 2 only): no digit on ``q_0``, at most 1 on ``q_1`` and at most 2 above.
    """
    if convention == "standard":
        return [t.a[1] - 1] + [t.a[k + 1] if k + 1 < t.depth else 0 for k in range(1, t.depth)]
    if convention == "literal":
        if t.r != 2:
            raise UsageError("the literal convention is defined for r = 2")
        return [0, 1] + [2] * (t.depth - 2)
    raise UsageError(f"unknown convention {convention!r}")


def valid_digits(digits, t: ConvergentTable, convention: str) -> bool:
    bounds = digit_bounds(t, convention)
    for k, e in enumerate(digits):
        if not 0 <= e <= bounds[k]:
            return False
        if k >= 1 and e == bounds[k] and e > 0 and digits[k - 1] != 0 and (convention == "standard" or e == 2):
            return False
    return True


def to_ostrowski(n: int, t: ConvergentTable, convention: str = "standard") -> OstrowskiDigits:
    """Greedy digit extraction from the largest ``q_k`` down."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if t.q[-2] <= n:
        raise UsageError(f"table too shallow for n={n}")
    bounds = digit_bounds(t, convention)
    digits = [0] * t.depth
    rem = n
    for k in range(t.depth - 1, -1, -1):
        e = min(bounds[k], rem // t.q[k])
        digits[k] = e
        rem -= e * t.q[k]
    if rem or not valid_digits(digits, t, convention):
        raise OstrowskiError(n, convention)
    return OstrowskiDigits(n, tuple(digits), convention)


def enumerate_representations(n_max: int, t: ConvergentTable, convention: str = "standard") -> list[int]:
    """Number of admissible digit strings of each value ``0..n_max`` (exhaustive)."""
    bounds = digit_bounds(t, convention)
    top = max(k for k in range(t.depth) if t.q[k] <= n_max)
    counts = [0] * (n_max + 1)
    digits = [0] * t.depth

    def rec(k: int, total: int):
        if k < 0:
            if valid_digits(digits, t, convention):
                counts[total] += 1
            return
        for e in range(bounds[k] + 1):
            v = total + e * t.q[k]
            if v > n_max:
                break
            digits[k] = e
            rec(k - 1, v)
        digits[k] = 0

    rec(top, 0)
    return counts


def uniqueness_check(n_max: int = 1000, convention: str = "standard", r: int = 2) -> VerifyReport:
    t = table_for(n_max, r)
    counts = enumerate_representations(n_max, t, convention)
    bad = [n for n in range(1, n_max + 1) if counts[n] != 1]
    rt = None
    if not bad:
        for n in range(1, n_max + 1):
            rep = to_ostrowski(n, t, convention)
            if rep.value(t) != n:
                rt = n
                break
    witness = None
    if bad or rt:
        witness = {"n": bad[0] if bad else rt, "representations": counts[bad[0]] if bad else 1}
    return VerifyReport(f"ostrowski uniqueness ({convention})", not bad and rt is None, n_max, witness,
                        {"unrepresentable": sum(1 for n in bad if counts[n] == 0),
                         "ambiguous": sum(1 for n in bad if counts[n] > 1)})


def digit_swap_check(n_max: int, convention: str = "standard") -> VerifyReport:
    """``a(n) = sum e_k p_k`` whenever ``n = sum e_k q_k``, canonical r = 2 shift."""
    t = table_for(n_max, 2)
    aB = beatty_array(BeattyParams.canonical(2), 0, n_max)
    mismatches = []
    matched = 0
    unrepresentable = 0
    for n in range(1, n_max + 1):
        try:
            rep = to_ostrowski(n, t, convention)
        except OstrowskiError:
            unrepresentable += 1
            if len(mismatches) < 20:
                mismatches.append((n, None, int(aB[n])))
            continue
        s = rep.swapped(t)
        if s == aB[n]:
            matched += 1
        elif len(mismatches) < 20:
            mismatches.append((n, s, int(aB[n])))
    ok = matched == n_max
    return VerifyReport(f"digit-swap ({convention})", ok, n_max,
                        None if ok else {"n": mismatches[0][0], "sum_p": mismatches[0][1], "a": mismatches[0][2]},
                        {"matched": matched, "pass_rate": matched / n_max, "convention": convention,
                         "unrepresentable": unrepresentable, "mismatches": mismatches})


def choose_convention(n_max: int) -> tuple[str, VerifyReport]:
    """Try the literal reading first and fall back to the standard one."""
    rep = None
    for conv in ("literal", "standard"):
        rep = digit_swap_check(n_max, conv)
        if rep.passed:
            return conv, rep
    return "none", rep


def pell_constants() -> VerifyReport:
    t = continued_fraction(2, 10)
    silver = QuadExpr(1, 1, 2)
    wall = [floor_quad(QuadExpr(0, Fraction(m, 2), 2)) for m in range(1, 11)]
    checks = {
        "3=q2": t.q[2] == 3,
        "4=q3-q2": t.q[3] - t.q[2] == 4,
        "7=q3": t.q[3] == 7,
        "pell_recurrence": all(t.q[k + 1] == 2 * t.q[k] + t.q[k - 1] for k in range(2, t.depth - 1)),
        "silver_root": silver * silver - 2 * silver - 1 == 0,
        "wall_column": wall == [0, 1, 2, 2, 3, 4, 4, 5, 6, 7],
    }
    failed = [k for k, v in checks.items() if not v]
    return VerifyReport("pell constants", not failed, len(checks), {"failed": failed} if failed else None,
                        {"q": t.q[1:9], "wall": wall})


def write_swap_csv(n_max: int, out: IO[str], convention: str = "standard"):
    t = table_for(n_max, 2)
    aB = beatty_array(BeattyParams.canonical(2), 0, n_max)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "digits", "sum_e_p", "a_B", "match"])
    for n in range(1, n_max + 1):
        rep = to_ostrowski(n, t, convention)
        s = rep.swapped(t)
        w.writerow([n, rep.text(), s, int(aB[n]), int(s == aB[n])])


def swap_array(n_max: int, convention: str = "standard") -> np.ndarray:
    t = table_for(n_max, 2)
    return np.array([0] + [to_ostrowski(n, t, convention).swapped(t) for n in range(1, n_max + 1)], dtype=np.int64)
