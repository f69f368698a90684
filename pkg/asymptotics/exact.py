"""
Exact arithmetic foundation.

Rationals are ``fractions.Fraction``; values of a quadratic field Q(√d) are
``QuadExt``; numeric values are ``mpmath.mpf`` at an explicit binary precision.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from math import isqrt

import mpmath

from .exceptions import ExactArithmeticError

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 256          # bits
TRIAL_DIVISION_LIMIT = 10 ** 6
_SQUAREFREE_CERTAIN_BELOW = 10 ** 18

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------- SQUARE-FREE PARTS ----------------------
def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` square-free."""
    if n < 0:
        raise ExactArithmeticError(f"square-free part of a negative number: {n}")
    if n == 0:
        return 0, 1
    square, free = 1, 1
    rest = n
    p = 2
    while p <= TRIAL_DIVISION_LIMIT and p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            square *= p ** (e // 2)
            if e % 2:
                free *= p
        p += 1 if p == 2 else 2
    if rest > 1:
        root = isqrt(rest)
        if root * root == rest:
            square *= root
        elif p * p > rest or rest < _SQUAREFREE_CERTAIN_BELOW:
            # no factor below the trial limit; a square would have been caught above
            free *= rest
        else:
            raise ExactArithmeticError(
                f"cannot extract the square-free part of {n}: cofactor {rest} "
                f"has no factor below {TRIAL_DIVISION_LIMIT}"
            )
    return square, free


# ---------------------- QUADRATIC EXTENSION ----------------------
class QuadExt:
    """The number ``a + b·√d`` with rational ``a``, ``b`` and square-free ``d``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        a, b, d = Fraction(a), Fraction(b), int(d)
        if d < 0:
            raise ExactArithmeticError(f"negative radicand {d}")
        if d == 0 and b != 0:
            raise ExactArithmeticError("d = 0 requires b = 0")
        if d > 1:
            square, free = squarefree_decomposition(d)
            if square != 1:
                raise ExactArithmeticError(f"radicand {d} is not square-free")
        self._set(a, b, d)

    def _set(self, a, b, d):
        if d == 1:
            a, b, d = a + b, _ZERO, 0
        if b == 0:
            d = 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def _make(cls, a, b, d):
        obj = cls.__new__(cls)
        obj._set(a, b, d)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    # -- helpers --
    @staticmethod
    def _lift(other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt._make(Fraction(other), _ZERO, 0)
        return None

    def _common_d(self, other):
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise ExactArithmeticError(f"cannot mix √{self.d} and √{other.d}")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt._make(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """(a + b√d)(a − b√d) = a² − d·b²."""
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt._make(self.a / n, -self.b / n, self.d)

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        n = self.norm()
        return sa * ((n > 0) - (n < 0))

    # -- arithmetic --
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.a + o.a, self.b + o.b, self._common_d(o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self.a - o.a, self.b - o.b, self._common_d(o))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d = self._common_d(o)
        return QuadExt._make(
            self.a * o.a + d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("QuadExt division by zero")
            return QuadExt._make(self.a / o.a, self.b / o.a, self.d)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadExt._make(_ONE, _ZERO, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return QuadExt._make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- comparison --
    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other):
        o = self._lift(other)
        if o is None:
            return None
        return (self - o).sign()

    def __lt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s >= 0

    def __float__(self):
        return float(to_float(self, 53))

    def __repr__(self):
        return f"QuadExt({self.a!r}, {self.b!r}, {self.d})"

    def __str__(self):
        return format_exact(self)


# ---------------------- HELPERS ----------------------
def coerce(value):
    """Normalize ints and numeric strings to Fraction; leave ring elements alone."""
    if isinstance(value, bool):
        raise TypeError("booleans are not ring elements")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    return value


def simplify(value):
    """Rational QuadExt values collapse to Fraction."""
    if isinstance(value, QuadExt) and value.is_rational:
        return value.a
    return coerce(value)


def is_exact_rational(value) -> bool:
    return isinstance(value, (int, Fraction)) or (isinstance(value, QuadExt) and value.is_rational)


def invert(value):
    """Multiplicative inverse of a ring element."""
    value = coerce(value)
    if isinstance(value, Fraction):
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / value
    return value.inverse()


def square_root(value) -> QuadExt:
    """Exact square root of a nonnegative rational as an element of Q(√f)."""
    value = simplify(value)
    if not isinstance(value, Fraction):
        raise ExactArithmeticError(f"square root of {value} leaves the quadratic extension")
    if value < 0:
        raise ExactArithmeticError(f"square root of negative {value}")
    if value == 0:
        return QuadExt._make(_ZERO, _ZERO, 0)
    num, den = value.numerator, value.denominator
    square, free = squarefree_decomposition(num * den)
    coefficient = Fraction(square, den)
    if free == 1:
        return QuadExt._make(coefficient, _ZERO, 0)
    return QuadExt._make(_ZERO, coefficient, free)


def quad_roots(A, B, C) -> list[QuadExt]:
    """Both roots of ``A·y² + B·y + C = 0``, the ``−√D`` branch first."""
    A, B, C = (QuadExt._lift(coerce(v)) for v in (A, B, C))
    if A is None or B is None or C is None:
        raise ExactArithmeticError("quad_roots expects rational or QuadExt coefficients")
    if not A:
        raise ExactArithmeticError("leading coefficient A must be nonzero")
    root = square_root(B * B - 4 * A * C)
    two_a = 2 * A
    return [(-B - root) / two_a, (-B + root) / two_a]


def to_float(value, precision: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Round an exact value to an ``mpf`` with ``precision`` bits."""
    if precision < 53:
        raise ExactArithmeticError(f"precision must be at least 53 bits, got {precision}")
    value = coerce(value)
    if isinstance(value, QuadExt) and value.is_rational:
        value = value.a
    if isinstance(value, Fraction):
        with mpmath.workprec(precision):
            return mpmath.fdiv(value.numerator, value.denominator)
    if not isinstance(value, QuadExt):
        raise ExactArithmeticError(f"cannot convert {type(value).__name__} to a float")
    with mpmath.workprec(precision + 32):
        root = mpmath.sqrt(value.d)
        if (value.a > 0) != (value.b > 0) and value.a != 0:
            # a and b√d cancel; divide the exact norm by the conjugate instead
            norm = value.norm()
            result = mpmath.fdiv(norm.numerator, norm.denominator) / (
                mpmath.fdiv(value.a.numerator, value.a.denominator)
                - mpmath.fdiv(value.b.numerator, value.b.denominator) * root
            )
        else:
            result = (
                mpmath.fdiv(value.a.numerator, value.a.denominator)
                + mpmath.fdiv(value.b.numerator, value.b.denominator) * root
            )
    with mpmath.workprec(precision):
        return +result


# ---------------------- FORMATTING ----------------------
def format_exact(value) -> str:
    value = simplify(value)
    if isinstance(value, Fraction):
        return str(value)
    if not isinstance(value, QuadExt):
        return f"({value})"
    if value.a == 0:
        return f"({value.b})√{value.d}"
    sign = "-" if value.b < 0 else "+"
    return f"({value.a} {sign} {abs(value.b)}√{value.d})"


def exact_to_json(value):
    value = simplify(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, QuadExt):
        return {"a": str(value.a), "b": str(value.b), "d": value.d}
    raise TypeError(f"{type(value).__name__} has no exact JSON form")


def exact_from_json(data):
    if isinstance(data, bool):
        raise ValueError("booleans are not exact values")
    if isinstance(data, (int, str)):
        return Fraction(data)
    if isinstance(data, dict):
        if set(data) - {"a", "b", "d"}:
            raise ValueError(f"unexpected keys {sorted(set(data) - {'a', 'b', 'd'})}")
        return simplify(QuadExt(Fraction(data.get("a", 0)), Fraction(data.get("b", 0)), int(data.get("d", 0))))
    raise ValueError(f"cannot read an exact value from {data!r}")
