"""Greedy solutions of ``a(sum_{j<r} a(n-j)) = n`` and window-sum checks."""
from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ConstructionError, UsageError
from .report import VerifyReport

log = logging.getLogger(__name__)

SeqProvider = Union[Callable[[int], int], Sequence[int], np.ndarray]


@dataclass
class GolombState:
    """Materialized prefix ``a(1..n)`` plus pending constraints ``position -> value``."""

    r: int
    prefix: list[int] = field(default_factory=list)
    positions: list[int] = field(default_factory=list)
    values: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.r < 2:
            raise UsageError(f"window size must be >= 2, got {self.r}")

    def __len__(self):
        return len(self.prefix)

    def a(self, k: int) -> int:
        return self.prefix[k - 1] if k >= 1 else 0

    def forced(self, p: int) -> int | None:
        i = bisect.bisect_left(self.positions, p)
        if i < len(self.positions) and self.positions[i] == p:
            return self.values[i]
        return None

    @property
    def constraints(self) -> dict[int, int]:
        return dict(zip(self.positions, self.values))

    def as_array(self) -> np.ndarray:
        return np.array([0] + self.prefix, dtype=np.int64)


def _feasible(state: GolombState, n: int, v: int, tail: int) -> bool:
    S = v + tail
    if S == n:
        return v == n
    if S < n:
        return state.a(S) == n
    f = state.forced(S)
    if f is not None:
        return f == n
    # new constraint S -> n; n exceeds every stored value, so S must exceed every stored position
    return not state.positions or S > state.positions[-1]


def greedy_extend(state: GolombState, upto: int) -> GolombState:
    """Extend the greedy (earliest nondecreasing) solution to length ``upto``."""
    if upto < len(state):
        raise UsageError(f"upto={upto} is shorter than the current prefix ({len(state)})")
    r = state.r
    for n in range(len(state) + 1, upto + 1):
        prev = state.a(n - 1) if n > 1 else 1
        tail = sum(state.a(n - j) for j in range(1, r))
        forced = state.forced(n)
        # values at later constrained positions bound a(n) from above
        i = bisect.bisect_right(state.positions, n)
        cap = state.values[i] if i < len(state.positions) else None
        if forced is not None:
            if forced < prev:
                raise ConstructionError(n, f"forced value {forced} breaks monotonicity (a(n-1)={prev})")
            candidates = [forced]
        else:
            top = cap if cap is not None else prev + n + 1
            candidates = range(prev, top + 1)
        for v in candidates:
            if _feasible(state, n, v, tail):
                break
        else:
            blocker = (state.positions[-1], state.values[-1]) if state.positions else None
            log.warning("greedy construction blocked at n=%d (r=%d)", n, r)
            raise ConstructionError(n, f"no feasible value; blocking constraint {blocker}")
        state.prefix.append(v)
        S = v + tail
        if S > n and state.forced(S) is None:
            state.positions.append(S)
            state.values.append(n)
    return state


def greedy(r: int, count: int) -> list[int]:
    return greedy_extend(GolombState(r), count).prefix


def window_sum(seq: SeqProvider, r: int, n: int) -> int:
    """``S(n) = a(n) + ... + a(n-r+1)`` with zero padding below index 1."""
    get = _getter(seq)
    return sum(get(n - j) for j in range(r) if n - j >= 1)


def _getter(seq: SeqProvider) -> Callable[[int], int]:
    if callable(seq):
        return lambda k: seq(k) if k >= 1 else 0
    return lambda k: int(seq[k]) if k >= 1 else 0


def as_array(seq: SeqProvider, hi: int) -> np.ndarray:
    """Materialize ``a(0..hi)`` (``a(0) = 0``) from any provider."""
    if hasattr(seq, "values") and callable(getattr(seq, "values")) and not isinstance(seq, dict):
        try:
            return np.asarray(seq.values(hi), dtype=np.int64)
        except TypeError:
            pass
    if callable(seq):
        return np.array([0] + [seq(k) for k in range(1, hi + 1)], dtype=np.int64)
    arr = np.asarray(seq, dtype=np.int64)
    if len(arr) <= hi:
        raise UsageError(f"sequence has {len(arr) - 1} terms, need {hi}")
    out = arr[:hi + 1].copy()
    out[0] = 0
    return out


def window_sums(a: np.ndarray, r: int, lo: int, hi: int) -> np.ndarray:
    """Vectorized ``S(n)`` for ``lo <= n <= hi`` from an array ``a[0..]`` with ``a[0] = 0``."""
    csum = np.concatenate(([0], np.cumsum(a, dtype=np.int64)))
    ns = np.arange(lo, hi + 1)
    # sum of a[max(n-r+1, 0) .. n]
    return csum[ns + 1] - csum[np.maximum(ns - r + 1, 0)]


def verify_strong(seq: SeqProvider, r: int, n_lo: int, n_hi: int,
                  expected_offset: int = 0, bound_hint: int | None = None) -> VerifyReport:
    """Check ``a(S(n)) == n + expected_offset`` for every ``n`` in ``[n_lo, n_hi]``.

    Array providers (lists, numpy arrays, greedy prefixes) limit the checkable
    range to the indices whose ``S(n)`` they cover.
    """
    if expected_offset not in (0, 1):
        raise UsageError("expected_offset must be 0 or 1")
    name = f"strong identity r={r} offset={expected_offset}"
    if n_hi < n_lo:
        return VerifyReport(name, True, 0)
    prefix = as_array(seq, n_hi)
    S = window_sums(prefix, r, n_lo, n_hi)
    top = int(S.max())
    if bound_hint is not None:
        top = max(top, bound_hint)
    if callable(seq) or hasattr(seq, "values"):
        a = as_array(seq, top)
    else:
        a = np.asarray(seq, dtype=np.int64)
        if len(a) <= top:
            raise UsageError(f"sequence too short: S(n) reaches {top}, have {len(a) - 1} terms")
    ns = np.arange(n_lo, n_hi + 1)
    bad = np.flatnonzero(a[S] != ns + expected_offset)
    if len(bad):
        i = int(bad[0])
        return VerifyReport(name, False, i + 1,
                            {"n": int(ns[i]), "S": int(S[i]), "a(S)": int(a[S[i]])},
                            {"failures": len(bad)})
    return VerifyReport(name, True, len(ns))


def verify_strong_prefix(prefix: Sequence[int], r: int, n_lo: int | None = None) -> VerifyReport:
    """Strong identity on every ``n`` whose ``S(n)`` lies inside a finite prefix ``a(1..N)``."""
    a = np.array([0] + list(prefix), dtype=np.int64)
    N = len(prefix)
    n_lo = n_lo if n_lo is not None else 1
    S = window_sums(a, r, 1, N)
    inside = np.flatnonzero(S <= N) + 1
    inside = inside[inside >= n_lo]
    if not len(inside):
        return VerifyReport(f"strong identity r={r} (prefix)", True, 0)
    return verify_strong(a, r, int(inside[0]), int(inside[-1]), 0)


def dyadic_check(prefix: Sequence[int], n_start: int = 2) -> VerifyReport:
    """``a(2n) = a(n) + a(n+1) - 1`` and ``a(2n+1) = a(n) + a(n+1)`` on a 1-based prefix.

    The odd rule fails at ``n = 1`` (``a(3) = 2``), so checking starts at ``n_start = 2``.
    """
    if len(prefix) < 3:
        raise UsageError("need at least 3 terms")
    a = [0] + list(prefix)
    N = len(prefix)
    checked = 0
    for n in range(n_start, N):
        if 2 * n <= N:
            checked += 1
            if a[2 * n] != a[n] + a[n + 1] - 1:
                return VerifyReport("dyadic", False, checked,
                                    {"n": n, "index": 2 * n, "a": a[2 * n], "expected": a[n] + a[n + 1] - 1})
        if 2 * n + 1 <= N:
            checked += 1
            if a[2 * n + 1] != a[n] + a[n + 1]:
                return VerifyReport("dyadic", False, checked,
                                    {"n": n, "index": 2 * n + 1, "a": a[2 * n + 1], "expected": a[n] + a[n + 1]})
    return VerifyReport("dyadic", True, checked)
