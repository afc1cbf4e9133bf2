"""Exact arithmetic in Q(sqrt(r)).

Every floor, fractional part and interval test in the package goes through
:class:`QuadExpr`, so no decision ever depends on rounding.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import UsageError

Number = Union[int, Fraction, "QuadExpr"]


class QuadExpr:
    """The number ``rat + surd * sqrt(radicand)`` with rational coefficients.

    Instances are immutable.  Square radicands are allowed; comparisons then
    agree with the rational value ``rat + surd * s``.
    """

    __slots__ = ("rat", "surd", "radicand")

    def __init__(self, rat=0, surd=0, radicand: int = 2):
        if not isinstance(radicand, int) or radicand < 1:
            raise UsageError(f"radicand must be a positive integer, got {radicand!r}")
        object.__setattr__(self, "rat", Fraction(rat))
        object.__setattr__(self, "surd", Fraction(surd))
        object.__setattr__(self, "radicand", radicand)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExpr is immutable")

    @classmethod
    def sqrt(cls, r: int) -> "QuadExpr":
        return cls(0, 1, r)

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> "QuadExpr":
        if isinstance(other, QuadExpr):
            if other.radicand != self.radicand:
                raise UsageError(
                    f"radicand mismatch: sqrt({self.radicand}) vs sqrt({other.radicand})")
            return other
        if isinstance(other, (int, Rational)):
            return QuadExpr(other, 0, self.radicand)
        return NotImplemented

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExpr(self.rat + o.rat, self.surd + o.surd, self.radicand)

    __radd__ = __add__

    def __neg__(self):
        return QuadExpr(-self.rat, -self.surd, self.radicand)

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExpr(self.rat - o.rat, self.surd - o.surd, self.radicand)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        r = self.radicand
        return QuadExpr(self.rat * o.rat + self.surd * o.surd * r,
                        self.rat * o.surd + o.rat * self.surd, r)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExpr":
        a, b, r = self.rat, self.surd, self.radicand
        norm = a * a - b * b * r
        if norm == 0:
            # only possible for square r: value is a + b*s
            s = math.isqrt(r)
            value = a + b * s
            if value == 0:
                raise ZeroDivisionError("QuadExpr division by zero")
            return QuadExpr(1 / value, 0, r)
        return QuadExpr(a / norm, -b / norm, r)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = QuadExpr(1, 0, self.radicand)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        return sign(self)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadExpr with {type(other).__name__}")
        return sign(self - o)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, UsageError):
            return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.value_if_rational())
        return hash((self.rat, self.surd, self.radicand))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return sign(self) != 0

    def is_rational(self) -> bool:
        return self.surd == 0 or math.isqrt(self.radicand) ** 2 == self.radicand

    def value_if_rational(self) -> Fraction:
        if self.surd == 0:
            return self.rat
        s = math.isqrt(self.radicand)
        if s * s != self.radicand:
            raise ValueError(f"{self} is irrational")
        return self.rat + self.surd * s

    # -- floor & friends --------------------------------------------------

    def __floor__(self):
        return floor_quad(self)

    def __ceil__(self):
        return -floor_quad(-self)

    def frac(self) -> "QuadExpr":
        return frac(self)

    def __float__(self):
        return float(self.rat) + float(self.surd) * math.sqrt(self.radicand)

    # -- rendering --------------------------------------------------------

    def __repr__(self):
        return f"QuadExpr({self.rat}, {self.surd}, {self.radicand})"

    def __str__(self):
        return render(self)

    def __reduce__(self):
        return (QuadExpr, (self.rat, self.surd, self.radicand))


def sign(x: QuadExpr) -> int:
    """Exact sign of ``a + b*sqrt(r)`` using integer arithmetic only."""
    sa = (x.rat > 0) - (x.rat < 0)
    sb = (x.surd > 0) - (x.surd < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 r
    a2 = x.rat * x.rat
    b2r = x.surd * x.surd * x.radicand
    if a2 > b2r:
        return sa
    if a2 < b2r:
        return sb
    return 0


def _integer_parts(x: QuadExpr) -> tuple[int, int, int]:
    """Write ``x = (A + B*sqrt(r)) / L`` with integers and ``L > 0``."""
    L = x.rat.denominator * x.surd.denominator // math.gcd(x.rat.denominator, x.surd.denominator)
    return x.rat.numerator * (L // x.rat.denominator), x.surd.numerator * (L // x.surd.denominator), L


def floor_isqrt(x: QuadExpr) -> int:
    """Floor through a single integer square root; independent of :func:`floor_quad`."""
    A, B, L = _integer_parts(x)
    return floor_surd(A, B, x.radicand, L)


def floor_surd(A: int, B: int, r: int, L: int = 1) -> int:
    """``floor((A + B*sqrt(r)) / L)`` for integers, ``L > 0``."""
    M = B * B * r
    k = math.isqrt(M)
    if B < 0 and k * k != M:
        k = -k - 1
    elif B < 0:
        k = -k
    return (A + k) // L


def floor_with_steps(x: QuadExpr) -> tuple[int, int]:
    """Floor plus the number of exact correction steps applied to the float hint.

    Falls back to :func:`floor_isqrt` when no usable hint exists or the hint
    is more than two steps off.
    """
    try:
        estimate = float(x)
    except OverflowError:
        return floor_isqrt(x), -1
    if not math.isfinite(estimate) or abs(estimate) > 2.0 ** 52:
        return floor_isqrt(x), -1
    hint = math.floor(estimate)
    m = hint
    for steps in range(3):
        below = sign(x - m) < 0
        if below:
            m -= 1
            continue
        if sign(x - (m + 1)) >= 0:
            m += 1
            continue
        return m, steps
    return floor_isqrt(x), -1


def floor_quad(x: QuadExpr) -> int:
    """Unique integer ``m`` with ``m <= x < m + 1``."""
    return floor_with_steps(x)[0]


def ceil_quad(x: QuadExpr) -> int:
    return -floor_quad(-x)


def frac(x: QuadExpr) -> QuadExpr:
    """Fractional part, always in ``[0, 1)``."""
    return x - floor_quad(x)


# -- text form -------------------------------------------------------------

def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def render(x: QuadExpr) -> str:
    """Render as ``p/q+u/v*sqrt(r)`` (the grammar accepted by :func:`parse_quad`)."""
    sep = "-" if x.surd < 0 else "+"
    return f"{_fmt(x.rat)}{sep}{_fmt(abs(x.surd))}*sqrt({x.radicand})"


def to_decimal(x: QuadExpr, places: int = 4) -> str:
    """Decimal rendering rounded half-up, computed exactly."""
    scale = 10 ** places
    n = floor_quad(x * scale + Fraction(1, 2))
    neg = n < 0
    n = abs(n)
    whole, part = divmod(n, scale)
    text = f"{whole}.{part:0{places}d}" if places else str(whole)
    return "-" + text if neg else text


_TERM = re.compile(
    r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?sqrt\(\s*(\d+)\s*\)\s*(?:/\s*(\d+))?"
    r"|\s*([+-]?)\s*(\d+(?:/\d+)?)")


def parse_quad(text: str, radicand: int | None = None) -> QuadExpr:
    """Parse ``A/B + C/E*sqrt(R)`` and simpler variants such as ``7/10``,
    ``sqrt(2)/2``, ``-2 + 2*sqrt(2)``.

    Decimal literals are rejected on purpose.
    """
    s = text.replace(" ", "")
    if not s or "." in s:
        raise UsageError(f"cannot parse exact shift {text!r}")
    rat = Fraction(0)
    surd = Fraction(0)
    seen_r = None
    pos = 0
    first = True
    while pos < len(s):
        if not first and s[pos] not in "+-":
            raise UsageError(f"cannot parse exact shift {text!r} at {s[pos:]!r}")
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse exact shift {text!r} at {s[pos:]!r}")
        if m.group(3) is not None:
            sgn = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(4):
                coef /= int(m.group(4))
            rr = int(m.group(3))
            if seen_r is not None and rr != seen_r:
                raise UsageError(f"mixed radicands in {text!r}")
            seen_r = rr
            surd += sgn * coef
        else:
            sgn = -1 if m.group(5) == "-" else 1
            rat += sgn * Fraction(m.group(6))
        pos = m.end()
        first = False
    if radicand is not None and seen_r is not None and seen_r != radicand:
        raise UsageError(f"shift {text!r} uses sqrt({seen_r}) but r={radicand}")
    r = radicand if radicand is not None else (seen_r if seen_r is not None else 2)
    return QuadExpr(rat, surd, r)
