"""Sawtooth sums of fractional parts and the counting inequality behind the strong identity."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable

import numpy as np

from .beatty import BeattyParams, theta, theta_floats
from .errors import InternalConsistencyError, UsageError
from .golomb import window_sum
from .qfield import QuadExpr, ceil_quad, floor_quad, frac, render, to_decimal
from .report import VerifyReport


def is_square(r: int) -> bool:
    return math.isqrt(r) ** 2 == r


def _require_nonsquare(r: int):
    if r < 2 or is_square(r):
        raise UsageError(f"r must be a non-square integer >= 2, got {r}")


def _c(r: int) -> QuadExpr:
    return QuadExpr(0, Fraction(1, r), r)


def phi(r: int, n: int) -> QuadExpr:
    """``sum_{j<r} {(n-j)/sqrt(r) + sqrt(r)/2}``, exact."""
    if r < 2 or n < r:
        raise UsageError("need r >= 2 and n >= r")
    params = BeattyParams.canonical(r)
    total = QuadExpr(0, 0, r)
    for j in range(r):
        total = total + theta(params, n - j)
    return total


def count_N(r: int) -> int:
    """Number of ``1 <= j <= r-1`` with ``{j/sqrt(r)} < sqrt(r) - floor(sqrt(r))``."""
    _require_nonsquare(r)
    c = _c(r)
    beta = QuadExpr(-math.isqrt(r), 1, r)
    return sum(1 for j in range(1, r) if frac(c * j) < beta)


@dataclass(frozen=True)
class SawtoothProfile:
    r: int
    s: int
    t: int
    beta: QuadExpr
    u: int
    N: int
    bound: QuadExpr     # r*beta + s - 1
    margin: QuadExpr    # bound - N
    sup_phi: QuadExpr
    inf_phi: QuadExpr
    steps: tuple        # Delta_k, k = 1..r-1
    partial: tuple      # P(j), j = 0..r-1

    def row(self) -> dict:
        return {
            "r": self.r, "s": self.s, "beta": to_decimal(self.beta), "N": self.N,
            "bound": to_decimal(self.bound), "margin": to_decimal(self.margin),
            "sup_phi": to_decimal(self.sup_phi), "inf_phi": to_decimal(self.inf_phi),
            "margin_positive": self.margin > 0,
            "exact_margin": render(self.margin), "exact_sup_phi": render(self.sup_phi),
            "exact_inf_phi": render(self.inf_phi),
        }


def profile(r: int) -> SawtoothProfile:
    """Counting data and exact extrema of the sawtooth for non-square ``r``.

    The extrema come from the ``r`` jump points of the sawtooth: just before
    the jump indexed by ``j0`` the value is
    ``r - j0 + sum_{k<=j0} {kc} - sum_{m<=r-1-j0} {mc}``, and just after it is one less.
    """
    _require_nonsquare(r)
    s = math.isqrt(r)
    t = r - s * s
    c = _c(r)
    beta = QuadExpr(-s, 1, r)
    fr = [None] + [frac(c * j) for j in range(1, r)]
    N = sum(1 for j in range(1, r) if fr[j] < beta)
    bound = r * beta + (s - 1)
    prefix = [QuadExpr(0, 0, r)]
    for j in range(1, r):
        prefix.append(prefix[-1] + fr[j])
    sigma = prefix[r - 1]
    local_max = [r - j0 + prefix[j0] - prefix[r - 1 - j0] for j0 in range(r)]
    steps = tuple(fr[k] + fr[r - k] - 1 for k in range(1, r))
    partial = [QuadExpr(0, 0, r)]
    for dk in steps:
        partial.append(partial[-1] + dk)
    # the two expressions of the local maxima must agree
    for j0 in range(r):
        if local_max[j0] != r - sigma + partial[j0]:
            raise InternalConsistencyError(f"local maximum mismatch at r={r}, j0={j0}")
    sup_phi = max(local_max)
    inf_phi = min(local_max) - 1
    return SawtoothProfile(r, s, t, beta, floor_quad(s * beta), N, bound, bound - N,
                           sup_phi, inf_phi, steps, tuple(partial))


def parity_identities(r: int) -> VerifyReport:
    """The four exact integer identities tying ``N(r)`` to ``t = r - s^2``."""
    _require_nonsquare(r)
    s = math.isqrt(r)
    t = r - s * s
    c = _c(r)
    beta = QuadExpr(-s, 1, r)
    N = count_N(r)
    u = floor_quad(s * beta)
    floor_kb = [floor_quad(k * beta) for k in range(1, s + 1)]
    checks = {
        "floor_s_beta": (u, (t - 1) // 2),
        "N_formula": (N, (s + 1) * (t - 1) - 2 * sum(floor_kb)),
        "floor_swap": (sum(floor_kb), sum(s + 1 - ceil_quad(m / beta) for m in range(1, u + 1))),
        "pairing": (2 * sum(floor_quad(j * c) for j in range(1, r)), (r - 1) * (s - 1) + N),
    }
    failed = {k: v for k, v in checks.items() if v[0] != v[1]}
    counters = {"N": N, "s": s, "t": t, "u": u}
    counters.update({k: v[0] for k, v in checks.items()})
    return VerifyReport(f"parity identities r={r}", not failed, len(checks),
                        {"r": r, **{k: f"{a} != {b}" for k, (a, b) in failed.items()}} if failed else None,
                        counters)


def profile_invariants(p: SawtoothProfile) -> VerifyReport:
    """Palindromic steps, ``sup + inf = r``, positive margin, and the band
    ``sup Phi <= (r + sqrt(r))/2`` (equality only at r = 2, where it is not attained).

    ``|P(j)| < 1`` is reported in the counters but is not a pass condition:
    it fails from r = 8 on, while the spread bound ``max P - min P < sqrt(r) - 1``
    that the band actually needs keeps holding.
    """
    r = p.r
    alpha = QuadExpr.sqrt(r)
    problems = {}
    if any(p.steps[k - 1] != p.steps[r - k - 1] for k in range(1, r)):
        problems["palindrome"] = True
    if p.sup_phi + p.inf_phi != r:
        problems["sup_plus_inf"] = str(p.sup_phi + p.inf_phi)
    if not p.margin > 0:
        problems["margin"] = str(p.margin)
    if not p.N < p.bound:
        problems["counting_inequality"] = True
    top = (r + alpha) / 2
    if not (p.sup_phi < top or (r == 2 and p.sup_phi == top)):
        problems["band"] = str(p.sup_phi)
    spread = max(p.partial) - min(p.partial)
    if not (spread < alpha - 1 or (r == 2 and spread == alpha - 1)):
        problems["spread"] = str(spread)
    partial_ok = all(-1 < x < 1 for x in p.partial)
    return VerifyReport(f"sawtooth invariants r={r}", not problems, 6, problems or None,
                        {"partial_bound_holds": partial_ok, "spread": float(spread)})


def phi_band_check(r: int, n_max: int, n_min: int | None = None) -> VerifyReport:
    """``(r - sqrt(r))/2 < Phi(n) <= (r + sqrt(r))/2`` for ``n_min <= n <= n_max``.

    Phi is summed from the fractional parts themselves, independently of the
    window sums used by the strong-identity check.
    """
    n_min = n_min if n_min is not None else r
    params = BeattyParams.canonical(r)
    ns = np.arange(n_min, n_max + 1, dtype=np.int64)
    vals = np.zeros(len(ns))
    for j in range(r):
        vals += theta_floats(params, ns - j)
    alpha = math.sqrt(r)
    lo, hi = (r - alpha) / 2, (r + alpha) / 2
    lo_q = QuadExpr(Fraction(r, 2), Fraction(-1, 2), r)
    hi_q = QuadExpr(Fraction(r, 2), Fraction(1, 2), r)
    ok = (vals > lo) & (vals <= hi)
    unsure = (np.abs(vals - lo) < 1e-6) | (np.abs(vals - hi) < 1e-6)
    for i in np.flatnonzero(unsure):
        v = phi(r, int(ns[i]))
        ok[i] = lo_q < v <= hi_q
    bad = np.flatnonzero(~ok)
    report = VerifyReport(f"sawtooth band r={r}", not len(bad), len(ns),
                          counters={"min_phi": float(vals.min()), "max_phi": float(vals.max())})
    if len(bad):
        report.witness = {"n": int(ns[bad[0]]), "phi": float(vals[bad[0]])}
    return report


def square_closed_form(s: int, n: int) -> tuple[int, int]:
    """Window sum and ``a(S(n))`` for ``r = s^2`` in closed form, checked against direct evaluation."""
    if s < 2 or n < s * s:
        raise UsageError("need s >= 2 and n >= s^2")
    if s % 2:
        S, target = s * n - s * (s - 1) // 2, n
    else:
        S, target = s * n - s * (s - 2) // 2, n + 1
    params = BeattyParams.canonical(s * s)
    direct = window_sum(params, s * s, n)
    if direct != S or params(S) != target:
        raise InternalConsistencyError(
            f"square closed form disagrees at s={s}, n={n}: S={S} vs {direct}, a(S)={params(S)} vs {target}")
    return S, target


def hermite_grouping(s: int, n: int) -> bool:
    q = s // 2
    return sum((n + q - u) // s for u in range(s)) == n + q - s + 1


def table1(rmax: int) -> list[SawtoothProfile]:
    return [profile(r) for r in range(2, rmax + 1) if not is_square(r)]


TABLE1_COLUMNS = ["r", "s", "beta", "N", "bound", "margin", "sup_phi", "inf_phi"]


def write_table1_csv(profiles: Iterable[SawtoothProfile], out: IO[str], exact: bool = True):
    cols = TABLE1_COLUMNS + (["margin_positive", "exact_margin", "exact_sup_phi", "exact_inf_phi"] if exact else [])
    w = csv.DictWriter(out, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for p in profiles:
        w.writerow(p.row())
