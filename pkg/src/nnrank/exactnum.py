"""Exact arithmetic over Q and the real quadratic fields Q(sqrt d).

Rationals are :class:`fractions.Fraction` (reduced, positive denominator,
zero is ``0/1``).  :class:`QuadExt` holds ``a + b*sqrt(d)`` with rational
``a``, ``b`` and a square-free radicand ``d`` (default 2).

Entries are written in a compact text grammar shared by every file format
of the package::

    INT | INT/UINT | R1+R2s | R1-R2s | R2s

where ``s`` stands for sqrt(2), e.g. ``5/44``, ``3/4+1/8s``,
``-1/11+1/11s``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Fraction

__all__ = [
    "Rational",
    "QuadExt",
    "RadicandMismatch",
    "SQRT2",
    "sign",
    "to_quad",
    "parse_entry",
    "format_entry",
    "to_float",
]


class RadicandMismatch(ValueError):
    """Raised when combining elements of two different quadratic fields."""


def _is_square_free(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _rat_sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@total_ordering
class QuadExt:
    """Element ``a + b*sqrt(d)`` of the real quadratic field Q(sqrt d).

    Instances are immutable.  Equality with ``int``/``Fraction`` holds when
    ``b == 0``, and hashing agrees with the rational embedding.
    """

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, a: Union[int, Fraction] = 0, b: Union[int, Fraction] = 0, d: int = 2) -> None:
        if not _is_square_free(d):
            raise ValueError(f"radicand must be a square-free integer >= 2, got {d}")
        self._a = Fraction(a)
        self._b = Fraction(b)
        self._d = d

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def d(self) -> int:
        return self._d

    def is_rational(self) -> bool:
        return self._b == 0

    def conjugate(self) -> QuadExt:
        return QuadExt(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - d*b^2``."""
        return self._a * self._a - self._d * self._b * self._b

    def _coerce(self, other: object) -> QuadExt | None:
        if isinstance(other, QuadExt):
            if other._d != self._d:
                raise RadicandMismatch(f"sqrt({self._d}) vs sqrt({other._d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self._d)
        return None

    def __repr__(self) -> str:
        return f"QuadExt({self._a!s}, {self._b!s}, d={self._d})"

    def __str__(self) -> str:
        if self._d == 2:
            return format_entry(self)
        return f"{self._a}+{self._b}*sqrt({self._d})"

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * math.sqrt(self._d)

    def __bool__(self) -> bool:
        return bool(self._a) or bool(self._b)

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._d))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadExt):
            return self._d == other._d and self._a == other._a and self._b == other._b
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and self._a == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return sign(self - o) < 0

    def __neg__(self) -> QuadExt:
        return QuadExt(-self._a, -self._b, self._d)

    def __pos__(self) -> QuadExt:
        return self

    def __abs__(self) -> QuadExt:
        return -self if sign(self) < 0 else self

    def __add__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self._a + o._a, self._b + o._b, self._d)

    __radd__ = __add__

    def __sub__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self._a - o._a, self._b - o._b, self._d)

    def __rsub__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        return QuadExt(a1 * a2 + self._d * b1 * b2, a1 * b2 + a2 * b1, self._d)

    __rmul__ = __mul__

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            # the norm of a nonzero element never vanishes for square-free d
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return QuadExt(self._a / n, -self._b / n, self._d)

    def __truediv__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> QuadExt:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadExt(1, 0, self._d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


SQRT2 = QuadExt(0, 1)

Number = Union[int, Fraction, QuadExt]


def sign(x: Number) -> int:
    """Exact sign of a rational or of ``a + b*sqrt(d)``.

    Same-sign parts decide immediately; otherwise ``a^2`` is compared with
    ``d*b^2`` (never equal for ``b != 0`` and square-free ``d``).
    """
    if not isinstance(x, QuadExt):
        return _rat_sign(Fraction(x))
    sa, sb = _rat_sign(x.a), _rat_sign(x.b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    if x.a * x.a > x.d * x.b * x.b:
        return sa
    return sb


def to_quad(x: Number, d: int = 2) -> QuadExt:
    if isinstance(x, QuadExt):
        return x
    return QuadExt(x, 0, d)


def to_float(x: Number) -> float:
    return float(x)


_RAT = r"-?\d+(?:/\d+)?"
_ENTRY_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?:(?P<op>[+-])(?P<b>\d+(?:/\d+)?)s)?|(?P<bonly>{_RAT})s)$"
)


def parse_entry(text: str) -> Union[Fraction, QuadExt]:
    """Parse one entry of the text grammar.

    Returns a :class:`Fraction` for purely rational entries and a
    :class:`QuadExt` (d=2) otherwise.

    >>> parse_entry("-1/11+1/11s")
    QuadExt(-1/11, 1/11, d=2)
    """
    m = _ENTRY_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed entry: {text!r}")
    if m.group("bonly") is not None:
        return QuadExt(0, Fraction(m.group("bonly")))
    a = Fraction(m.group("a"))
    if m.group("b") is None:
        return a
    b = Fraction(m.group("b"))
    if m.group("op") == "-":
        b = -b
    if b == 0:
        return a
    return QuadExt(a, b)


def format_entry(x: Number) -> str:
    """Inverse of :func:`parse_entry` (canonical form)."""
    if isinstance(x, QuadExt):
        if x.d != 2:
            raise RadicandMismatch("the entry grammar only covers sqrt(2)")
        if x.b == 0:
            return str(x.a)
        op = "+" if x.b > 0 else "-"
        return f"{x.a}{op}{abs(x.b)}s"
    return str(Fraction(x))
