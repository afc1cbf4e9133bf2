"""The triple-nested identity ``a(a(f(n))) = a(n)`` for shifted Beatty sequences."""
from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .beatty import BeattyParams, beatty_array, theta, theta_floats
from .errors import InternalConsistencyError, UsageError
from .golomb import window_sums
from .qfield import QuadExpr, floor_quad
from .report import VerifyReport


def interval_endpoints(r: int) -> tuple[QuadExpr, QuadExpr] | None:
    """Exact shift interval for r = 2 and r = 3; ``None`` for other r."""
    if r == 2:
        return QuadExpr(0, Fraction(1, 2), 2), QuadExpr(-2, 2, 2)
    if r == 3:
        return QuadExpr(Fraction(1, 2), Fraction(1, 6), 3), QuadExpr(Fraction(-1, 2), Fraction(5, 6), 3)
    return None


@dataclass(frozen=True)
class NestedContext:
    params: BeattyParams
    D: QuadExpr
    d_L: QuadExpr | None = None
    d_R: QuadExpr | None = None

    @classmethod
    def for_shift(cls, r: int, d) -> "NestedContext":
        params = BeattyParams(r, d if isinstance(d, QuadExpr) else QuadExpr(d, 0, r))
        ends = interval_endpoints(r)
        D = params.d * (QuadExpr.sqrt(r) + 1)
        return cls(params, D, *(ends or (None, None)))

    @property
    def r(self) -> int:
        return self.params.r

    @property
    def c(self) -> QuadExpr:
        return self.params.c

    def in_interval(self) -> bool | None:
        if self.d_L is None:
            return None
        return self.d_L <= self.params.d <= self.d_R


# -- single-index quantities --------------------------------------------------

def _a(params: BeattyParams, k: int) -> int:
    return params(k)


def f_value(params: BeattyParams, n: int) -> int:
    return sum(params(n - j) for j in range(params.r))


def big_theta(params: BeattyParams, n: int) -> QuadExpr:
    """``theta_n + theta_{n-1} + ... + theta_{n-r+1}``."""
    total = QuadExpr(0, 0, params.r)
    for j in range(params.r):
        total = total + theta(params, n - j)
    return total


def shift_m(ctx: NestedContext, n: int) -> int:
    """``m(n) = a(f(n)) - n``, computed directly and from the closed-form floor.

    Closed form: ``m(n) = floor(D - c*Theta(n) - (r-1)/2)`` with
    ``Theta(n) = sum_{j<r} theta_{n-j}``.
    """
    r = ctx.r
    if n < r:
        raise UsageError(f"need n >= r (n={n}, r={r})")
    p = ctx.params
    direct = p(f_value(p, n)) - n
    closed = floor_quad(ctx.D - ctx.c * big_theta(p, n) - Fraction(r - 1, 2))
    if direct != closed:
        raise InternalConsistencyError(f"m({n}) direct={direct} closed={closed} at d={p.d}")
    return direct


@dataclass(frozen=True)
class Regime:
    label: str
    n_repeat: bool
    prev_repeat: bool
    t: QuadExpr          # theta_n for r=2, theta_{n-2} for r=3


_R2_STATUS = {"I": (True, False), "II": (False, False), "III": (False, True)}
_R3_STATUS = {"A": (True, False), "B": (False, False), "C": (False, True), "D": (True, False)}


def classify_regime(ctx: NestedContext, n: int) -> Regime:
    """Residue class of the rotation at ``n`` and the predicted repeat status of ``(n, n-1)``.

    The prediction is checked against the actual increments of ``a``.
    """
    p, c = ctx.params, ctx.c
    if n < ctx.r or n < 2:
        raise UsageError("need n >= r")
    if ctx.r == 2:
        t = theta(p, n)
        label = "I" if t < 1 - c else ("II" if t < c else "III")
        predicted = _R2_STATUS[label]
    elif ctx.r == 3:
        t = theta(p, n - 2)
        if t < 2 - 3 * c:
            label = "A"
        elif t < 1 - c:
            label = "B"
        elif t < 2 - 2 * c:
            label = "C"
        else:
            label = "D"
        predicted = _R3_STATUS[label]
    else:
        raise UsageError("regime tables exist for r = 2 and r = 3 only")
    actual = (p(n + 1) == p(n), p(n) == p(n - 1))
    if actual != predicted:
        raise InternalConsistencyError(
            f"regime {label} predicts repeat status {predicted} at n={n}, observed {actual}")
    return Regime(label, actual[0], actual[1], t)


def theta_regime_formula(c: QuadExpr, t: QuadExpr) -> tuple[str, QuadExpr]:
    """r = 3: regime of ``t`` and the piecewise-affine value of Theta."""
    if t < 2 - 3 * c:
        return "A", 3 * t + 3 * c - 1
    if t < 1 - c:
        return "B", 3 * t + 3 * c - 1
    if t < 2 - 2 * c:
        return "C", 3 * t + 3 * c - 2
    return "D", 3 * t + 3 * c - 3


def theta_ranges_r3() -> dict[str, tuple[QuadExpr, QuadExpr]]:
    """Half-open ranges ``[lo, hi)`` of Theta on each r = 3 regime."""
    s3 = QuadExpr.sqrt(3)
    return {
        "A": (s3 - 1, 5 - 2 * s3),
        "B": (5 - 2 * s3, QuadExpr(2, 0, 3)),
        "C": (QuadExpr(1, 0, 3), 4 - s3),
        "D": (3 - s3, s3),
    }


def expansion_value(ctx: NestedContext, n: int) -> QuadExpr:
    """``c*n + R(n)`` with ``R(n) = R0 + c^2 sum e(n-j) + c e(f(n)) + e(a(f(n)))``,
    ``e = -theta`` and ``R0 = d(c + 2) - c(r - 1)/2``.  Equals ``a(a(f(n)))`` exactly.
    """
    p, c, r = ctx.params, ctx.c, ctx.r
    fn = f_value(p, n)
    afn = p(fn)
    R0 = p.d * (c + 2) - c * Fraction(r - 1, 2)
    R = R0 - c * c * big_theta(p, n) - c * theta(p, fn) - theta(p, afn)
    return c * n + R


def expansion_check(ctx: NestedContext, ns: Iterable[int]) -> VerifyReport:
    p = ctx.params
    checked = 0
    for n in ns:
        checked += 1
        lhs = floor_quad(expansion_value(ctx, n))
        rhs = p(p(f_value(p, n)))
        if lhs != rhs:
            return VerifyReport("expansion", False, checked, {"n": n, "floor": lhs, "a(a(f))": rhs})
    return VerifyReport("expansion", True, checked)


# -- range computations ---------------------------------------------------------

@dataclass
class _Chunk:
    lo: int
    hi: int
    first_fail: int | None
    m_counts: dict
    n_plus_violations: int
    n_minus_violations: int


def _nested_arrays(params: BeattyParams, lo: int, hi: int):
    r = params.r
    a = beatty_array(params, 0, hi + 1)
    f = window_sums(a, r, lo, hi)
    top = int(f.max()) + 2
    big = beatty_array(params, 0, top)
    af = big[f]
    aaf = big[af]
    return a, f, af, aaf


def _m_closed_array(ctx: NestedContext, ns: np.ndarray) -> np.ndarray:
    p, r = ctx.params, ctx.r
    big = np.zeros(len(ns))
    for j in range(r):
        big += theta_floats(p, ns - j)
    x = float(ctx.D) - p.c_float * big - (r - 1) / 2
    out = np.floor(x).astype(np.int64)
    fl = np.floor(x)
    near = np.minimum(x - fl, fl + 1 - x) < 1e-7
    for i in np.flatnonzero(near):
        n = int(ns[i])
        out[i] = floor_quad(ctx.D - ctx.c * big_theta(p, n) - Fraction(r - 1, 2))
    return out


def _nested_chunk(ctx: NestedContext, lo: int, hi: int, dual: bool) -> _Chunk:
    p = ctx.params
    a, f, af, aaf = _nested_arrays(p, lo, hi)
    ns = np.arange(lo, hi + 1)
    m = af - ns
    if dual:
        closed = _m_closed_array(ctx, ns)
        diff = np.flatnonzero(closed != m)
        if len(diff):
            n = int(ns[diff[0]])
            raise InternalConsistencyError(
                f"m({n}) direct={int(m[diff[0]])} closed={int(closed[diff[0]])} at d={p.d}")
    bad = np.flatnonzero(aaf != a[ns])
    n_repeat = a[ns + 1] == a[ns]
    prev_repeat = a[ns - 1] == a[ns]
    vals, counts = np.unique(m, return_counts=True)
    return _Chunk(lo, hi, int(ns[bad[0]]) if len(bad) else None,
                  {int(v): int(k) for v, k in zip(vals, counts)},
                  int(np.sum((m >= 1) & ~n_repeat)), int(np.sum((m <= -1) & ~prev_repeat)))


def _partition(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, hi - lo + 1))
    edges = np.linspace(lo, hi + 1, parts + 1).astype(np.int64)
    return [(int(edges[i]), int(edges[i + 1]) - 1) for i in range(parts) if edges[i + 1] > edges[i]]


def _run_chunks(ctx, lo, hi, threads, dual, chunk=200_000) -> list[_Chunk]:
    pieces = _partition(lo, hi, max(threads, (hi - lo) // chunk + 1))
    if threads <= 1:
        return [_nested_chunk(ctx, a, b, dual) for a, b in pieces]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(lambda ab: _nested_chunk(ctx, ab[0], ab[1], dual), pieces))


def failure_details(ctx: NestedContext, n: int) -> dict:
    p = ctx.params
    info = {"n": n, "m": p(f_value(p, n)) - n,
            "theta_n": float(theta(p, n)), "theta_n-1": float(theta(p, n - 1))}
    if ctx.r in (2, 3):
        reg = classify_regime(ctx, n)
        info["regime"] = reg.label
        info["n_repeat"] = reg.n_repeat
        info["n-1_repeat"] = reg.prev_repeat
    if ctx.r == 3:
        info["theta_n-2"] = float(theta(p, n - 2))
    return info


def verify_nested(ctx: NestedContext, n_lo: int, n_hi: int, threads: int = 1,
                  dual: bool = True) -> VerifyReport:
    """Check ``a(a(f(n))) == a(n)`` for all ``n`` in ``[n_lo, n_hi]``.

    With ``dual`` the shift ``m(n)`` is also evaluated from its closed form and
    any disagreement raises :class:`InternalConsistencyError`.
    """
    if n_lo < ctx.r:
        raise UsageError(f"n_lo must be >= r={ctx.r}")
    chunks = _run_chunks(ctx, n_lo, n_hi, threads, dual)
    m_counts: dict[int, int] = {}
    for ch in chunks:
        for k, v in ch.m_counts.items():
            m_counts[k] = m_counts.get(k, 0) + v
    fails = [ch.first_fail for ch in chunks if ch.first_fail is not None]
    counters = {"m_counts": dict(sorted(m_counts.items())),
                "n_plus_violations": sum(ch.n_plus_violations for ch in chunks),
                "n_minus_violations": sum(ch.n_minus_violations for ch in chunks)}
    name = f"nested r={ctx.r} d={ctx.params.d}"
    if fails:
        n = min(fails)
        return VerifyReport(name, False, n - n_lo + 1, failure_details(ctx, n), counters)
    return VerifyReport(name, True, n_hi - n_lo + 1, None, counters)


@dataclass
class Witness:
    n: int
    m: int
    regime: str | None
    t: QuadExpr
    side: str | None            # "lower" / "upper" relative to the proven interval
    in_window: bool | None
    details: dict = field(default_factory=dict)


def predicted_window(ctx: NestedContext, n: int) -> tuple[str | None, bool | None]:
    """Whether ``n`` lies in the failure window predicted for shifts outside the interval."""
    if ctx.d_L is None:
        return None, None
    p, c, D, d = ctx.params, ctx.c, ctx.D, ctx.params.d
    if ctx.d_L <= d <= ctx.d_R:
        return None, None
    side = "lower" if d < ctx.d_L else "upper"
    if ctx.r == 2:
        th = theta(p, n)
        if side == "lower":
            return side, (1 - c <= th < c) and th > (D - c) / (2 * c)
        return side, (c <= th) and th <= (D - 1) / (2 * c)
    t = theta(p, n - 2)
    s3 = QuadExpr.sqrt(3)
    if side == "upper":
        return side, (1 - c <= t < 2 - 2 * c) and t < (1 - c) + (D - 2 - c) / s3
    t_star = max((s3 * (D - 1) + 1) / 3 - c, 2 - 3 * c)
    return side, t_star < t < 1 - c


def find_failure(ctx: NestedContext, n_cap: int = 100_000, threads: int = 1) -> Witness | None:
    """Least ``n <= n_cap`` with ``a(a(f(n))) != a(n)``, tagged with regime and window membership."""
    lo = ctx.r
    step = 5_000
    while lo <= n_cap:
        hi = min(n_cap, lo + step - 1)
        chunks = _run_chunks(ctx, lo, hi, threads, dual=False)
        fails = [ch.first_fail for ch in chunks if ch.first_fail is not None]
        if fails:
            n = min(fails)
            info = failure_details(ctx, n)
            side, inside = predicted_window(ctx, n)
            t = theta(ctx.params, n if ctx.r == 2 else n - 2)
            return Witness(n, info["m"], info.get("regime"), t, side, inside, info)
        lo = hi + 1
        step *= 4
    warnings.warn(f"no failure up to n={n_cap} for r={ctx.r}, d={ctx.params.d}", RuntimeWarning,
                  stacklevel=2)
    return None


def theta_range_check(grid: int = 1500, n_max: int = 10_000,
                      shifts: Sequence[QuadExpr] | None = None) -> VerifyReport:
    """r = 3: Theta per regime, its extrema over the non-repeat sets, and the bound on m(n)."""
    c = QuadExpr(0, Fraction(1, 3), 3)
    d_L, d_R = interval_endpoints(3)
    if shifts is None:
        shifts = [d_L, QuadExpr(0, Fraction(1, 2), 3), d_R]
    ranges = theta_ranges_r3()
    problems: list[str] = []
    points: list[tuple[QuadExpr, QuadExpr, QuadExpr]] = []  # t, theta_{n-1}, theta_n

    for k in range(grid):
        t = QuadExpr(Fraction(k, grid), 0, 3)
        points.append((t, (t + c).frac(), (t + 2 * c).frac()))
    orbit_m: dict[int, int] = {}
    for d in shifts:
        ctx = NestedContext.for_shift(3, d)
        p = ctx.params
        ths = [theta(p, n) for n in range(1, n_max + 1)]
        for n in range(3, n_max + 1):
            t, t1, t0 = ths[n - 3], ths[n - 2], ths[n - 1]
            points.append((t, t1, t0))
            big = t + t1 + t0
            val = ctx.D - c * big
            if not (2 - 2 * c < val <= 1 + 2 * c):
                problems.append(f"D - c*Theta out of range at n={n}, d={d}")
                break
            m = floor_quad(val) - 1
            orbit_m[m] = orbit_m.get(m, 0) + 1
    if set(orbit_m) - {-1, 0, 1}:
        problems.append(f"m outside {{-1,0,1}}: {sorted(orbit_m)}")

    low = {"B", "C"}
    high = {"A", "B", "D"}
    best_low = best_high = None
    for t, t1, t0 in points:
        big = t + t1 + t0
        label, formula = theta_regime_formula(c, t)
        if formula != big:
            problems.append(f"Theta formula mismatch at t={t} ({label})")
            continue
        lo, hi = ranges[label]
        if not (lo <= big < hi):
            problems.append(f"Theta={float(big):.6f} outside range of {label}")
        if label in low and (best_low is None or big < best_low[0]):
            best_low = (big, t, label)
        if label in high and (best_high is None or big > best_high[0]):
            best_high = (big, t, label)
    # extrema sit next to t = 1 - c: smallest t of C from the right, largest t of B from the left
    if best_low is not None:
        cands = [t for t, _, _ in points if 1 - c <= t < 2 - 2 * c]
        if not (best_low[0] > 1 and best_low[2] == "C" and best_low[1] == min(cands)):
            problems.append("infimum over B and C not approached at t -> (1-c)+")
    if best_high is not None:
        cands = [t for t, _, _ in points if 2 - 3 * c <= t < 1 - c]
        if not (best_high[0] < 2 and best_high[2] == "B" and best_high[1] == max(cands)):
            problems.append("supremum over A, B, D not approached at t -> (1-c)-")
    return VerifyReport("theta ranges r=3", not problems, len(points),
                        {"problems": problems[:5]} if problems else None,
                        {"orbit_m": dict(sorted(orbit_m.items())),
                         "inf_BC": float(best_low[0]) if best_low else None,
                         "sup_ABD": float(best_high[0]) if best_high else None})


# -- scanning ---------------------------------------------------------------------

@dataclass
class ScanRow:
    d: QuadExpr
    passed: bool
    first_witness: int | None


@dataclass
class ScanResult:
    r: int
    rows: list[ScanRow]

    def passing(self) -> list[QuadExpr]:
        return [row.d for row in self.rows if row.passed]

    def boundaries(self) -> dict:
        ok = self.passing()
        if not ok:
            return {"passing": None}
        lo, hi = min(ok), max(ok)
        below = [row.d for row in self.rows if not row.passed and row.d < lo]
        above = [row.d for row in self.rows if not row.passed and row.d > hi]
        return {"last_fail_below": max(below) if below else None, "first_pass": lo,
                "last_pass": hi, "first_fail_above": min(above) if above else None,
                "contiguous": all(row.passed for row in self.rows if lo <= row.d <= hi)}


def scan_interval(r: int, d_grid: Sequence, n_cap: int = 10_000, threads: int = 1) -> ScanResult:
    """Run the nested check for each shift of a grid."""
    if r < 2:
        raise UsageError("r must be >= 2")

    def one(d):
        ctx = NestedContext.for_shift(r, d)
        rep = verify_nested(ctx, r, n_cap, dual=False)
        return ScanRow(ctx.params.d, rep.passed, None if rep.passed else rep.witness["n"])

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(one, d_grid))
    else:
        rows = [one(d) for d in d_grid]
    return ScanResult(r, rows)


def rational_grid(r: int, lo: Fraction, hi: Fraction, step: Fraction) -> list[QuadExpr]:
    if step <= 0:
        raise UsageError("step must be positive")
    out = []
    x = Fraction(lo)
    while x <= hi:
        out.append(QuadExpr(x, 0, r))
        x += step
    return out


SCAN_COLUMNS = ["d_num", "d_den", "d_surd_num", "d_surd_den", "pass", "first_witness"]


def write_scan_csv(result: ScanResult, out: IO[str]):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for row in result.rows:
        d = row.d
        w.writerow([d.rat.numerator, d.rat.denominator, d.surd.numerator, d.surd.denominator,
                    int(row.passed), "" if row.first_witness is None else row.first_witness])
