"""
Truncated Laurent series in ``t = 1/x`` and log-affine values ``a(t)·ln x + b(t)``.

Coefficients live in any exact ring that supports ``+ - *`` with ints and an
``inverse()`` for units: Fraction, QuadExt and the SymbolicPoly of the fit module.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath

from .exact import (
    DEFAULT_PRECISION,
    coerce,
    exact_to_json,
    format_exact,
    invert,
    is_exact_rational,
    simplify,
    to_float,
)
from .exceptions import SeriesError

DEFAULT_ORDER = 12
MIN_VALUATION = -2


def _is_scalar(value) -> bool:
    return not isinstance(value, (LaurentSeries, LogAffine))


class LaurentSeries:
    """Sparse map ``power -> coefficient`` known below ``order`` (terms t^k, k ≥ order, are unknown)."""

    __slots__ = ("_coeffs", "order")

    def __init__(self, coeffs=None, order: int = DEFAULT_ORDER + 1):
        order = int(order)
        clean = {}
        for power, value in (coeffs or {}).items():
            power = int(power)
            if power >= order:
                continue
            value = coerce(value)
            if value != 0:
                clean[power] = value
        if clean and min(clean) < MIN_VALUATION:
            raise SeriesError(
                f"principal part t^{min(clean)} exceeds the supported t^{MIN_VALUATION}"
            )
        self._coeffs = clean
        self.order = order

    # -- constructors --
    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER + 1) -> "LaurentSeries":
        return cls({}, order)

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER + 1) -> "LaurentSeries":
        return cls({0: 1}, order)

    @classmethod
    def monomial(cls, coefficient, power: int, order: int = DEFAULT_ORDER + 1) -> "LaurentSeries":
        return cls({power: coefficient}, order)

    @classmethod
    def from_polynomial(cls, coefficients, order: int = DEFAULT_ORDER + 1) -> "LaurentSeries":
        """Ascending coefficients ``c0 + c1·t + c2·t² + …``."""
        return cls(dict(enumerate(coefficients)), order)

    # -- inspection --
    @property
    def valuation(self) -> int:
        return min(self._coeffs) if self._coeffs else self.order

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, power: int):
        if power >= self.order:
            raise SeriesError(f"t^{power} is beyond the truncation order {self.order}")
        return self._coeffs.get(power, Fraction(0))

    def items(self):
        return sorted(self._coeffs.items())

    def leading(self):
        """``(power, coefficient)`` of the lowest nonzero term, or None."""
        if not self._coeffs:
            return None
        power = min(self._coeffs)
        return power, self._coeffs[power]

    def truncate(self, order: int) -> "LaurentSeries":
        return LaurentSeries(self._coeffs, min(order, self.order))

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``t^k``."""
        return LaurentSeries({p + k: c for p, c in self._coeffs.items()}, self.order + k)

    def map_coefficients(self, fn) -> "LaurentSeries":
        return LaurentSeries({p: fn(c) for p, c in self._coeffs.items()}, self.order)

    # -- ring operations --
    def __add__(self, other):
        if isinstance(other, LaurentSeries):
            out = dict(self._coeffs)
            for p, c in other._coeffs.items():
                out[p] = out.get(p, 0) + c
            return LaurentSeries(out, min(self.order, other.order))
        if _is_scalar(other):
            out = dict(self._coeffs)
            out[0] = out.get(0, 0) + coerce(other)
            return LaurentSeries(out, self.order)
        return NotImplemented

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return LaurentSeries({p: -c for p, c in self._coeffs.items()}, self.order)

    def __sub__(self, other):
        if isinstance(other, (LaurentSeries,)) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            order = min(self.order + other.valuation, other.order + self.valuation)
            out = {}
            for i, a in self._coeffs.items():
                for j, b in other._coeffs.items():
                    k = i + j
                    if k < order:
                        out[k] = out.get(k, 0) + a * b
            return LaurentSeries(out, order)
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, factor) -> "LaurentSeries":
        factor = coerce(factor)
        return LaurentSeries({p: c * factor for p, c in self._coeffs.items()}, self.order)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * reciprocal(other)
        if isinstance(other, int):
            return LaurentSeries({p: c / other for p, c in self._coeffs.items()}, self.order)
        if _is_scalar(other):
            return self.scale(invert(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = min(self.order, other.order)
        left = {p: c for p, c in self._coeffs.items() if p < order}
        right = {p: c for p, c in other._coeffs.items() if p < order}
        return left == right

    __hash__ = None

    def __repr__(self):
        return f"LaurentSeries({format_series(self)})"

    def __str__(self):
        return format_series(self)


# ---------------------- ELEMENTARY FUNCTIONS ----------------------
def _derivative(s: LaurentSeries) -> LaurentSeries:
    return LaurentSeries({p - 1: p * c for p, c in s.items() if p != 0}, s.order - 1)


def reciprocal(s: LaurentSeries) -> LaurentSeries:
    """``1/s``; the leading coefficient must be a unit of the ring."""
    lead = s.leading()
    if lead is None:
        raise SeriesError("reciprocal of the zero series")
    v, c = lead
    try:
        c_inv = invert(c)
    except (ZeroDivisionError, SeriesError) as exc:
        raise SeriesError(f"leading coefficient {c} is not invertible") from exc
    # s = c·t^v·u with u = 1 + u1·t + …
    n_terms = s.order - v
    u = [Fraction(0)] * n_terms
    for p, value in s.items():
        u[p - v] = value * c_inv
    r = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
    for n in range(1, n_terms):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if u[k] != 0 and r[n - k] != 0:
                acc = acc + u[k] * r[n - k]
        r[n] = -acc
    return LaurentSeries({n - v: r[n] * c_inv for n in range(n_terms)}, s.order - 2 * v)


def log1p(s: LaurentSeries) -> LaurentSeries:
    """``ln(1 + s)`` for a series with vanishing constant term."""
    if s.is_zero():
        return LaurentSeries.zero(s.order)
    if s.valuation < 1:
        raise SeriesError(f"log1p needs valuation ≥ 1, got {s.valuation}")
    # (ln(1+s))' = s'/(1+s), integrated term by term
    q = _derivative(s) * reciprocal(1 + s)
    return LaurentSeries({p + 1: c / (p + 1) for p, c in q.items()}, q.order + 1)


def exp(s: LaurentSeries) -> LaurentSeries:
    """``exp(s)`` for a series with vanishing constant term."""
    if s.is_zero():
        return LaurentSeries.one(s.order)
    if s.valuation < 1:
        raise SeriesError(f"exp needs valuation ≥ 1, got {s.valuation}")
    order = s.order
    e = [Fraction(1)] + [Fraction(0)] * (order - 1)
    terms = dict(s.items())
    for n in range(1, order):
        acc = Fraction(0)
        for k, c in terms.items():
            if k <= n and e[n - k] != 0:
                acc = acc + k * c * e[n - k]
        e[n] = acc / n
    return LaurentSeries(dict(enumerate(e)), order)


def pow_affine(base: LaurentSeries, exponent):
    """``base**exponent`` computed as ``exp(exponent·log1p(base − 1))``.

    Returns a LaurentSeries when the logarithm has no constant term. When it
    does, ``exp`` has no exact representation and the logarithm itself comes
    back as ``LogAffine(0, L)``.
    """
    shifted = base - 1
    if not shifted.is_zero() and shifted.valuation < 1:
        raise SeriesError("pow_affine needs a base with constant term 1")
    log_value = exponent * log1p(shifted)
    if log_value.valuation < 0:
        raise SeriesError("exponent·log(base) has a pole; no exact power exists")
    if log_value.order <= 0 or log_value.coefficient(0) == 0:
        return exp(log_value)
    return LogAffine(LaurentSeries.zero(log_value.order), log_value)


# ---------------------- LOG-AFFINE ----------------------
class LogAffine:
    """The value ``a(t)·ln x + b(t)`` with ``ln x`` kept symbolic."""

    __slots__ = ("a", "b")

    def __init__(self, a: LaurentSeries, b: LaurentSeries):
        order = min(a.order, b.order)
        self.a = a.truncate(order)
        self.b = b.truncate(order)

    @property
    def order(self) -> int:
        return self.a.order

    def is_plain(self) -> bool:
        return self.a.is_zero()

    def _lift(self, other):
        if isinstance(other, LogAffine):
            return other
        if isinstance(other, LaurentSeries):
            return LogAffine(LaurentSeries.zero(other.order), other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return LogAffine(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return LogAffine(-self.a, -self.b)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return LogAffine(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, LaurentSeries) or _is_scalar(other):
            return LogAffine(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def truncate(self, order: int) -> "LogAffine":
        return LogAffine(self.a.truncate(order), self.b.truncate(order))

    def evaluate(self, x, precision: int = DEFAULT_PRECISION):
        """Numeric value of the truncated expression at ``x``."""
        with mpmath.workprec(precision + 16):
            x = mpmath.mpf(x)
            value = evaluate_series(self.a, x, precision) * mpmath.log(x) + evaluate_series(self.b, x, precision)
        with mpmath.workprec(precision):
            return +value

    def __eq__(self, other):
        if not isinstance(other, LogAffine):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    __hash__ = None

    def __repr__(self):
        return f"LogAffine(a={format_series(self.a)}, b={format_series(self.b)})"

    def __str__(self):
        if self.is_plain():
            return format_series(self.b)
        return f"[{format_series(self.a)}]·ln x + [{format_series(self.b)}]"


def evaluate_series(s: LaurentSeries, x, precision: int = DEFAULT_PRECISION):
    """Sum of the known terms ``Σ c_k·x^(−k)``."""
    with mpmath.workprec(precision + 16):
        x = mpmath.mpf(x)
        total = mpmath.mpf(0)
        for power, c in s.items():
            total += to_float(simplify(c), precision + 16) * x ** (-power)
    with mpmath.workprec(precision):
        return +total


# ---------------------- OUTPUT ----------------------
def _power_text(k: int, var: str) -> str:
    if k == 0:
        return ""
    if k == 1:
        return var
    return f"{var}^{k}"


def format_series(s: LaurentSeries, var: str = "t") -> str:
    """``1/12·t - 1/360·t^3 + O(t^5)`` style rendering."""
    pieces = []
    for power, c in s.items():
        c = simplify(c)
        ptext = _power_text(power, var)
        if is_exact_rational(c):
            negative = c < 0
            magnitude = -c if negative else c
            body = "" if (magnitude == 1 and ptext) else str(magnitude)
        else:
            negative = False
            body = format_exact(c) if not hasattr(c, "variables") else f"({c})"
        text = f"{body}·{ptext}" if body and ptext else (body or ptext)
        if not pieces:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    tail = f"O({_power_text(s.order, var) or '1'})"
    if not pieces:
        return tail
    return "".join(pieces) + f" + {tail}"


def series_to_json(s: LaurentSeries) -> list:
    return [[power, exact_to_json(c)] for power, c in s.items()]
