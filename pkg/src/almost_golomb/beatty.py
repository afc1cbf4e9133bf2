"""Shifted Beatty sequences ``a(n) = floor(n/sqrt(r) + d)`` with ``d`` in Q(sqrt(r))."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UsageError
from .qfield import QuadExpr, floor_quad, floor_surd, sign
from .report import VerifyReport
from .words import encode, factor_sets, iterate_morphism

# relative slack for the float hint; far above double rounding error
_SLACK = 2.0 ** -40

STURMIAN_MORPHISM = {0: (0, 1), 1: (0, 1, 1)}


@dataclass(frozen=True)
class BeattyParams:
    r: int
    d: QuadExpr
    _kernel: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.r < 2:
            raise UsageError(f"r must be >= 2, got {self.r}")
        d = self.d
        if not isinstance(d, QuadExpr):
            d = QuadExpr(d, 0, self.r)
            object.__setattr__(self, "d", d)
        if d.radicand != self.r:
            raise UsageError(f"shift lives in Q(sqrt({d.radicand})), expected sqrt({self.r})")
        # c*n + d = (A + (B0 + n*K) sqrt(r)) / L
        L = math.lcm(d.rat.denominator, d.surd.denominator, self.r)
        A = d.rat.numerator * (L // d.rat.denominator)
        B0 = d.surd.numerator * (L // d.surd.denominator)
        K = L // self.r
        object.__setattr__(self, "_kernel", (A, B0, K, L))

    @classmethod
    def canonical(cls, r: int) -> "BeattyParams":
        """The shift ``sqrt(r)/2``."""
        return cls(r, QuadExpr(0, Fraction(1, 2), r))

    @property
    def c(self) -> QuadExpr:
        return QuadExpr(0, Fraction(1, self.r), self.r)

    @property
    def c_float(self) -> float:
        return 1.0 / math.sqrt(self.r)

    def real(self, n: int) -> QuadExpr:
        """``c*n + d`` as an exact number."""
        return QuadExpr(self.d.rat, Fraction(n, self.r) + self.d.surd, self.r)

    def floor_real(self, n: int) -> int:
        A, B0, K, L = self._kernel
        return floor_surd(A, B0 + n * K, self.r, L)

    def __call__(self, n: int) -> int:
        return eval_beatty(self, n)

    def values(self, hi: int, lo: int = 0) -> np.ndarray:
        """``a(n)`` for ``lo <= n <= hi`` (exact; zero below index 1)."""
        return beatty_array(self, lo, hi)


def eval_beatty(params: BeattyParams, n: int) -> int:
    if n < 1:
        return 0
    return params.floor_real(n)


def theta(params: BeattyParams, n: int) -> QuadExpr:
    """Exact fractional part ``{c n + d}``."""
    return params.real(n) - params.floor_real(n)


def _float_real(params: BeattyParams, ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c_f = params.c_float
    d_f = float(params.d)
    x = ns.astype(np.float64) * c_f + d_f
    tol = _SLACK * (np.abs(ns).astype(np.float64) * c_f + abs(d_f) + 1.0)
    return x, tol


def _floors(params: BeattyParams, ns: np.ndarray) -> np.ndarray:
    x, tol = _float_real(params, ns)
    fl = np.floor(x)
    near = np.minimum(x - fl, fl + 1.0 - x) <= tol
    out = fl.astype(np.int64)
    for i in np.flatnonzero(near):
        out[i] = params.floor_real(int(ns[i]))
    return out


def beatty_array(params: BeattyParams, lo: int, hi: int) -> np.ndarray:
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    out = _floors(params, ns)
    out[ns < 1] = 0
    return out


def theta_in(params: BeattyParams, ns: np.ndarray, left: QuadExpr, right: QuadExpr,
             closed: tuple[bool, bool] = (True, True)) -> np.ndarray:
    """Exact test ``theta_n in <left, right>`` for an array of indices.

    Decided in floating point where the margin is safe, exactly otherwise.
    """
    ns = np.asarray(ns, dtype=np.int64)
    x, tol = _float_real(params, ns)
    fl = _floors(params, ns)
    th = x - fl
    lf, rf = float(left), float(right)
    lo_ok = th >= lf if closed[0] else th > lf
    hi_ok = th <= rf if closed[1] else th < rf
    res = lo_ok & hi_ok
    unsure = (np.abs(th - lf) <= 2 * tol) | (np.abs(th - rf) <= 2 * tol)
    for i in np.flatnonzero(unsure):
        t = theta(params, int(ns[i]))
        sl = sign(t - left)
        sr = sign(right - t)
        res[i] = (sl > 0 or (closed[0] and sl == 0)) and (sr > 0 or (closed[1] and sr == 0))
    return res


def theta_floats(params: BeattyParams, ns: np.ndarray) -> np.ndarray:
    """Approximate fractional parts (for statistics and plotting only)."""
    ns = np.asarray(ns, dtype=np.int64)
    x, _ = _float_real(params, ns)
    return x - _floors(params, ns)


def difference_word(params: BeattyParams, length: int) -> np.ndarray:
    """``w(n) = a(n+1) - a(n)`` for ``n = 1..length``."""
    if length < 1:
        raise UsageError("length must be >= 1")
    a = beatty_array(params, 1, length + 1)
    return np.diff(a).astype(np.int8)


def multiplicity(params: BeattyParams, value: int) -> int:
    """Number of ``k >= 1`` with ``a(k) == value``."""
    root = QuadExpr.sqrt(params.r)
    first = -floor_quad(-((value - params.d) * root))
    stop = -floor_quad(-((value + 1 - params.d) * root))
    return max(0, stop - max(1, first))


def sturmian_morphism_check(length: int = 10_000, max_factor_len: int = 12,
                            params: BeattyParams | None = None,
                            rules=STURMIAN_MORPHISM) -> VerifyReport:
    """Compare factor sets of the difference word with those of the morphism's fixed point."""
    if length < 1:
        raise UsageError("length must be >= 1")
    params = params or BeattyParams.canonical(2)
    w = [int(b) for b in difference_word(params, length)]
    s, k = iterate_morphism(rules, 0, length)
    wt, st = encode(w, (0, 1)), encode(s, (0, 1))
    fw, fs = factor_sets(wt, max_factor_len), factor_sets(st, max_factor_len)
    decode = str.maketrans("ab", "01")
    mismatch = None
    for ell in range(1, max_factor_len + 1):
        if fw[ell] != fs[ell]:
            only_w = sorted(x.translate(decode) for x in fw[ell] - fs[ell])
            only_s = sorted(x.translate(decode) for x in fs[ell] - fw[ell])
            mismatch = {"length": ell, "only_in_beatty": only_w[:5], "only_in_morphism": only_s[:5]}
            break
    probe = wt[:min(64, len(wt))]
    offset = st.find(probe)
    ones_w = sum(w) / len(w)
    ones_s = sum(s[:length]) / min(length, len(s))
    return VerifyReport(
        "sturmian-morphism", mismatch is None, length, mismatch,
        {"iterations": k, "morphism_length": len(s), "alignment_offset": None if offset < 0 else offset,
         "density_beatty": ones_w, "density_morphism": ones_s},
    )


def continuous_solution(r: int) -> tuple[QuadExpr, QuadExpr]:
    """Slope ``1/sqrt(r)`` and intercept ``(sqrt(r) - 1)/2`` of the affine solution."""
    if r < 2:
        raise UsageError("r must be >= 2")
    return QuadExpr(0, Fraction(1, r), r), QuadExpr(Fraction(-1, 2), Fraction(1, 2), r)


def affine_residual(r: int, slope: QuadExpr, intercept: QuadExpr) -> tuple[QuadExpr, QuadExpr]:
    """Coefficients of ``phi(sum_j phi(x - j)) - x`` for ``phi(x) = slope*x + intercept``.

    Returns (coefficient of x, constant term); both vanish for a solution.
    """
    c, d = slope, intercept
    lin = r * c * c - 1
    const = r * c * d - r * c * c * Fraction(r - 1, 2) + d
    return lin, const
