"""
Approximation formulas for Γ(x+1) of the form

    √(2π) · M(x+θ, x+θ*)^K(x+ε, x+ε*) · e^(−N(x+σ, x+σ*)) · e^(r(x))

with exact error-series computation and numeric evaluation in log scale.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional

import mpmath

from . import series as S
from .exact import DEFAULT_PRECISION, coerce, to_float
from .exceptions import DomainError, FormulaError
from .means import Arithmetic, MeanExpr, eval_mean, mean_series
from .series import LaurentSeries, LogAffine
from .special import lngamma_expansion, polygamma_num, psi_num

logger = logging.getLogger(__name__)

WORKING_ORDER_SLACK = 2


class Shape(enum.Enum):
    SYMMETRIC_PAIR = "symmetric_pair"  # symmetric M and N, θ+θ* = σ+σ* = 1, K = A
    SHIFTED_MEAN = "shifted_mean"  # N ≡ M, free θ and σ, K = A
    MIDPOINT_KERNEL = "midpoint_kernel"  # M = N = x + 1/2, K free with ε+ε* = 1
    SYMMETRIC_PAIR_KERNEL = "symmetric_pair_kernel"  # symmetric_pair with a symmetric K
    SHIFTED_MEAN_KERNEL = "shifted_mean_kernel"  # shifted_mean with a symmetric K


class RateClass(str, enum.Enum):
    POWER = "power"
    LOG_ORDER = "log-order residual"
    VANISHES = "vanishes through order"


# ---------------------- CORRECTION TERMS ----------------------
@dataclass(frozen=True)
class RationalFunction:
    """num(t)/den(t) with ascending coefficient tuples in t = 1/x."""

    num: tuple
    den: tuple = (Fraction(1),)

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(coerce(c) for c in self.num))
        object.__setattr__(self, "den", tuple(coerce(c) for c in self.den))
        if not self.den or all(c == 0 for c in self.den):
            raise FormulaError("rational function needs a nonzero denominator")

    def to_series(self, order: int) -> LaurentSeries:
        return LaurentSeries.from_polynomial(self.num, order) * S.reciprocal(
            LaurentSeries.from_polynomial(self.den, order)
        )

    def evaluate(self, x, precision: int):
        t = 1 / mpmath.mpf(x)
        top = mpmath.fsum(to_float(c, precision) * t ** k for k, c in enumerate(self.num))
        bottom = mpmath.fsum(to_float(c, precision) * t ** k for k, c in enumerate(self.den))
        if bottom == 0:
            raise DomainError(f"correction denominator vanishes at x = {mpmath.nstr(x, 15)}")
        return top / bottom

    def map_coefficients(self, fn):
        return RationalFunction(tuple(fn(c) for c in self.num), tuple(fn(c) for c in self.den))


@dataclass(frozen=True)
class LogRational:
    """c · ln P(x) with P(∞) = 1."""

    c: Fraction
    P: RationalFunction
    kind = "log_rational"

    def __post_init__(self):
        object.__setattr__(self, "c", coerce(self.c))
        if self.P.num[:1] != self.P.den[:1] or self.P.den[0] == 0:
            raise FormulaError("log correction needs P(∞) = 1")

    def expansion(self, order: int) -> LaurentSeries:
        return S.log1p(self.P.to_series(order) - 1).scale(self.c)

    def evaluate(self, x, precision: int):
        value = self.P.evaluate(x, precision)
        if value <= 0:
            raise DomainError(f"log correction argument is not positive at x = {mpmath.nstr(x, 15)}")
        return to_float(self.c, precision) * mpmath.log(value)

    def map_coefficients(self, fn):
        return LogRational(fn(self.c), self.P.map_coefficients(fn))


@dataclass(frozen=True)
class RationalFn:
    """P(x) with P(∞) = 0."""

    P: RationalFunction
    kind = "rational"

    def __post_init__(self):
        if self.P.num and self.P.num[0] != 0:
            raise FormulaError("rational correction must vanish at infinity")

    def expansion(self, order: int) -> LaurentSeries:
        return self.P.to_series(order)

    def evaluate(self, x, precision: int):
        return self.P.evaluate(x, precision)

    def map_coefficients(self, fn):
        return RationalFn(self.P.map_coefficients(fn))


# ---------------------- FORMULA ----------------------
@dataclass(frozen=True)
class MeanSlot:
    mean: MeanExpr
    shifts: tuple

    def __post_init__(self):
        if len(self.shifts) != 2:
            raise FormulaError("a mean slot needs exactly two shifts")
        object.__setattr__(self, "shifts", tuple(coerce(s) for s in self.shifts))

    def series(self, order: int) -> LaurentSeries:
        return mean_series(self.mean, self.shifts[0], self.shifts[1], order)

    def evaluate(self, x, precision: int):
        a = x + to_float(self.shifts[0], precision)
        b = x + to_float(self.shifts[1], precision)
        if isinstance(self.mean, Arithmetic):
            # defined on all reals
            return (a + b) / 2
        return eval_mean(self.mean, a, b, precision)

    def map_coefficients(self, fn):
        return MeanSlot(self.mean.map_coefficients(fn), tuple(fn(s) for s in self.shifts))


def _default_exponent() -> MeanSlot:
    return MeanSlot(Arithmetic(), (Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class Formula:
    name: str
    shape: Shape
    base: MeanSlot
    subtrahend: Optional[MeanSlot] = None
    exponent: MeanSlot = field(default_factory=_default_exponent)
    corrections: tuple = ()
    description: str = ""
    reference: str = ""

    def __post_init__(self):
        object.__setattr__(self, "corrections", tuple(self.corrections))
        self._check_shape()

    def _check_shape(self):
        shape = self.shape
        e1, e2 = self.exponent.shifts
        if e1 + e2 != 1:
            raise FormulaError(f"{self.name}: exponent shifts must satisfy ε + ε* = 1")
        if shape in (Shape.SYMMETRIC_PAIR, Shape.SHIFTED_MEAN) and not isinstance(self.exponent.mean, Arithmetic):
            raise FormulaError(f"{self.name}: {shape.value} needs the arithmetic mean as exponent")
        if shape in (Shape.SYMMETRIC_PAIR_KERNEL, Shape.SHIFTED_MEAN_KERNEL) and not self.exponent.mean.is_symmetric():
            raise FormulaError(f"{self.name}: {shape.value} needs a symmetric exponent mean")
        if shape in (Shape.SYMMETRIC_PAIR, Shape.SYMMETRIC_PAIR_KERNEL):
            if self.subtrahend is None:
                raise FormulaError(f"{self.name}: {shape.value} needs its own subtracted mean N")
            for slot, label in ((self.base, "M"), (self.subtrahend, "N")):
                if slot.shifts[0] + slot.shifts[1] != 1:
                    raise FormulaError(f"{self.name}: shifts of {label} must sum to 1")
                if not slot.mean.is_symmetric():
                    raise FormulaError(f"{self.name}: {label} must be a symmetric mean")
        elif shape in (Shape.SHIFTED_MEAN, Shape.SHIFTED_MEAN_KERNEL):
            if self.subtrahend is not None:
                raise FormulaError(f"{self.name}: {shape.value} subtracts M itself")
        elif shape is Shape.MIDPOINT_KERNEL:
            for slot in (self.base, self.subtrahend or self.base):
                if not isinstance(slot.mean, Arithmetic) or slot.shifts[0] + slot.shifts[1] != 1:
                    raise FormulaError(f"{self.name}: midpoint_kernel pins M and N to x + 1/2")

    @property
    def subtracted(self) -> MeanSlot:
        return self.subtrahend or self.base

    def shifts(self) -> tuple:
        """Shifts that bound the domain; an arithmetic exponent never does."""
        out = list(self.base.shifts)
        if self.subtrahend is not None:
            out += list(self.subtrahend.shifts)
        if not isinstance(self.exponent.mean, Arithmetic):
            out += list(self.exponent.shifts)
        return tuple(out)

    def map_coefficients(self, fn) -> "Formula":
        """Apply ``fn`` to every parameter (mean coefficients, shifts, corrections)."""
        return Formula(
            name=self.name,
            shape=self.shape,
            base=self.base.map_coefficients(fn),
            subtrahend=self.subtrahend.map_coefficients(fn) if self.subtrahend else None,
            exponent=self.exponent.map_coefficients(fn),
            corrections=tuple(c.map_coefficients(fn) for c in self.corrections),
            description=self.description,
            reference=self.reference,
        )


# ---------------------- SERIES ----------------------
def formula_log(f: Formula, order: int = S.DEFAULT_ORDER) -> LogAffine:
    """ln f(x) − ½ln 2π as ``a(t)·ln x + b(t)``, exact through ``t^order``."""
    if order < 1:
        raise FormulaError("order must be at least 1")
    work = order + WORKING_ORDER_SLACK
    k = f.exponent.series(work).shift(-1)
    m = f.base.series(work)
    n = m if f.subtrahend is None else f.subtrahend.series(work)
    b = k * S.log1p(m - 1) - n.shift(-1)
    for term in f.corrections:
        b = b + term.expansion(work + 1)
    return LogAffine(k, b).truncate(order + 1)


def error_series(f: Formula, order: int = S.DEFAULT_ORDER) -> LogAffine:
    """ln Γ(x+1) − ln f(x) as ``a(t)·ln x + b(t)``."""
    return lngamma_expansion(order) - formula_log(f, order)


@dataclass(frozen=True)
class ErrorSummary:
    rate_class: RateClass
    power: Optional[int]
    coefficient: object
    order: int

    def describe(self) -> str:
        if self.rate_class is RateClass.VANISHES:
            return f"error vanishes through t^{self.order - 1}"
        if self.rate_class is RateClass.LOG_ORDER:
            return f"log-order residual t^{self.power}·ln x"
        return f"rate x^-{self.power}"


def summarize_error(err: LogAffine) -> ErrorSummary:
    """Classify the leading behaviour of an error series."""
    lead_a = err.a.leading()
    if lead_a is not None:
        return ErrorSummary(RateClass.LOG_ORDER, lead_a[0], lead_a[1], err.order)
    lead_b = err.b.leading()
    if lead_b is None:
        return ErrorSummary(RateClass.VANISHES, None, None, err.order)
    return ErrorSummary(RateClass.POWER, lead_b[0], lead_b[1], err.order)


# ---------------------- NUMERICS ----------------------
def domain_floor(f: Formula, precision: int = 64):
    """x must exceed ``−min(1, shifts)``."""
    with mpmath.workprec(max(precision, 53)):
        return -min([mpmath.mpf(1)] + [to_float(s, max(precision, 53)) for s in f.shifts()])


def eval_formula(f: Formula, x, precision: int = DEFAULT_PRECISION):
    """ln f(x), including ½ln 2π."""
    work = precision + 20
    with mpmath.workprec(work):
        x = mpmath.mpf(x)
        if x <= domain_floor(f, work):
            raise DomainError(f"{f.name}: x = {mpmath.nstr(x, 15)} is outside the domain")
        k = f.exponent.evaluate(x, work)
        m = f.base.evaluate(x, work)
        n = m if f.subtrahend is None else f.subtrahend.evaluate(x, work)
        value = k * mpmath.log(m) - n + mpmath.log(2 * mpmath.pi) / 2
        for term in f.corrections:
            value += term.evaluate(x, work)
    with mpmath.workprec(precision):
        return +value


def _psi_domain(theta, sigma, x, precision):
    floor = -min(mpmath.mpf(1), to_float(theta, precision), to_float(sigma, precision))
    if x <= floor:
        raise DomainError(f"x = {mpmath.nstr(x, 15)} is outside the domain x > {mpmath.nstr(floor, 15)}")


def psi_error(m: MeanExpr, theta, sigma, x, precision: int = DEFAULT_PRECISION):
    """ψ(x+1) − ln M(x+θ, x+σ)."""
    work = precision + 20
    with mpmath.workprec(work):
        x = mpmath.mpf(x)
        _psi_domain(theta, sigma, x, work)
        mean = eval_mean(m, x + to_float(theta, work), x + to_float(sigma, work), work)
        value = psi_num(x + 1, work) - mpmath.log(mean)
    with mpmath.workprec(precision):
        return +value


def polygamma_error(n: int, m: MeanExpr, theta, sigma, x, precision: int = DEFAULT_PRECISION):
    """(−1)^(n−1) ψ^(n)(x+1) − (n−1)!/M(x+θ, x+σ)^n."""
    if n < 1:
        raise DomainError("polygamma_error needs n ≥ 1")
    work = precision + 20
    with mpmath.workprec(work):
        x = mpmath.mpf(x)
        _psi_domain(theta, sigma, x, work)
        mean = eval_mean(m, x + to_float(theta, work), x + to_float(sigma, work), work)
        value = (-1) ** (n - 1) * polygamma_num(n, x + 1, work) - factorial(n - 1) / mean ** n
    with mpmath.workprec(precision):
        return +value
