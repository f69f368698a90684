"""
Bivariate means: construction, numeric evaluation, expansion of M(x+θ, x+σ)/x
in t = 1/x, and sampled mean-validity checks.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Optional

import mpmath
import numpy as np

from . import series as S
from .exact import DEFAULT_PRECISION, coerce, invert, to_float
from .exceptions import DomainError, MeanError
from .series import LaurentSeries

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 512
DEFAULT_TOLERANCE_BITS = 40
MAX_RATIO = 1e4

_HALF = Fraction(1, 2)


def _numeric(c, precision: int):
    if hasattr(c, "variables"):
        raise MeanError("numeric evaluation needs concrete parameter values, got a symbolic coefficient")
    return to_float(c, precision)


def _t(theta, order: int) -> LaurentSeries:
    """The series ``θ·t``."""
    return LaurentSeries({1: theta}, order)


# ---------------------- CATALOG ----------------------
class MeanExpr:
    """Base of the mean catalog; subclasses are frozen dataclasses."""

    kind: ClassVar[str] = ""

    def is_symmetric(self) -> bool:
        return True

    def map_coefficients(self, fn) -> "MeanExpr":
        return self

    def coefficients(self):
        return ()

    def _evaluate(self, a, b, precision: int):
        raise NotImplementedError

    def _expand(self, theta, sigma, order: int) -> LaurentSeries:
        raise NotImplementedError


@dataclass(frozen=True)
class Arithmetic(MeanExpr):
    kind: ClassVar[str] = "arithmetic"

    def _evaluate(self, a, b, precision):
        return (a + b) / 2

    def _expand(self, theta, sigma, order):
        return LaurentSeries({0: 1, 1: (theta + sigma) / 2}, order)


@dataclass(frozen=True)
class Geometric(MeanExpr):
    kind: ClassVar[str] = "geometric"

    def _evaluate(self, a, b, precision):
        return mpmath.sqrt(a * b)

    def _expand(self, theta, sigma, order):
        return S.exp((S.log1p(_t(theta, order)) + S.log1p(_t(sigma, order))) / 2)


@dataclass(frozen=True)
class Identric(MeanExpr):
    """I(a, b) = (b^b/a^a)^(1/(b−a))/e, I(a, a) = a."""

    kind: ClassVar[str] = "identric"

    def _evaluate(self, a, b, precision):
        h = b / a - 1
        if abs(h) < mpmath.ldexp(1, -(precision // 3)):
            # ln(I/a) = Σ_{k≥2} (−1)^k h^(k−1)/(k(k−1))
            return a * mpmath.exp(h / 2 - h ** 2 / 6 + h ** 3 / 12 - h ** 4 / 20)
        return mpmath.exp((b * mpmath.log(b) - a * mpmath.log(a)) / (b - a) - 1)

    def _expand(self, theta, sigma, order):
        # ln I(1+θt, 1+σt) = ((1+σt)ln(1+σt) − (1+θt)ln(1+θt))/((σ−θ)t) − 1
        work = order + 1
        lt, ls = S.log1p(_t(theta, work)), S.log1p(_t(sigma, work))
        top = (1 + _t(sigma, work)) * ls - (1 + _t(theta, work)) * lt
        inner = top.shift(-1).scale(invert(sigma - theta)) - 1
        return S.exp(inner).truncate(order)


@dataclass(frozen=True)
class Logarithmic(MeanExpr):
    """L(a, b) = (b − a)/(ln b − ln a), L(a, a) = a."""

    kind: ClassVar[str] = "logarithmic"

    def _evaluate(self, a, b, precision):
        h = b / a - 1
        if abs(h) < mpmath.ldexp(1, -(precision // 3)):
            return a * (1 + h / 2 - h ** 2 / 12 + h ** 3 / 24)
        return (b - a) / (mpmath.log(b) - mpmath.log(a))

    def _expand(self, theta, sigma, order):
        work = order + 1
        ratio = (S.log1p(_t(sigma, work)) - S.log1p(_t(theta, work))).shift(-1).scale(invert(sigma - theta))
        return S.reciprocal(ratio).truncate(order)


@dataclass(frozen=True)
class PowerProduct(MeanExpr):
    """Π M_i^(w_i) with rational weights summing to 1."""

    factors: tuple
    kind: ClassVar[str] = "power_product"

    def __post_init__(self):
        if not self.factors:
            raise MeanError("a power product needs at least one factor")
        if sum((coerce(w) for _, w in self.factors), Fraction(0)) != 1:
            raise MeanError("power-product weights must sum to 1")

    def is_symmetric(self):
        return all(m.is_symmetric() for m, _ in self.factors)

    def map_coefficients(self, fn):
        return PowerProduct(tuple((m.map_coefficients(fn), w) for m, w in self.factors))

    def coefficients(self):
        return tuple(c for m, _ in self.factors for c in m.coefficients())

    def _evaluate(self, a, b, precision):
        return mpmath.fprod(
            mpmath.power(m._evaluate(a, b, precision), _numeric(w, precision + 16))
            for m, w in self.factors
        )

    def _expand(self, theta, sigma, order):
        total = LaurentSeries.zero(order)
        for m, w in self.factors:
            total = total + S.log1p(mean_series(m, theta, sigma, order) - 1).scale(w)
        return S.exp(total)


@dataclass(frozen=True)
class RationalMean(MeanExpr):
    """Σ p_k a^k b^(n−k) / Σ q_k a^k b^(n−1−k); p_k is the coefficient of a^k b^(n−k)."""

    p: tuple
    q: tuple
    kind: ClassVar[str] = "rational"

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(coerce(c) for c in self.p))
        object.__setattr__(self, "q", tuple(coerce(c) for c in self.q))
        if len(self.q) < 1 or len(self.p) != len(self.q) + 1:
            raise MeanError(f"need n+1 numerator and n denominator coefficients, got {len(self.p)} and {len(self.q)}")
        if sum(self.p, Fraction(0)) != 1 or sum(self.q, Fraction(0)) != 1:
            raise MeanError("coefficient vectors must each sum to 1")

    @property
    def n(self) -> int:
        return len(self.q)

    def is_symmetric(self):
        return self.p == self.p[::-1] and self.q == self.q[::-1]

    def map_coefficients(self, fn):
        return RationalMean(tuple(fn(c) for c in self.p), tuple(fn(c) for c in self.q))

    def coefficients(self):
        return self.p + self.q

    def _evaluate(self, a, b, precision):
        n = self.n
        num = mpmath.fsum(_numeric(c, precision + 16) * a ** k * b ** (n - k) for k, c in enumerate(self.p))
        den = mpmath.fsum(_numeric(c, precision + 16) * a ** k * b ** (n - 1 - k) for k, c in enumerate(self.q))
        if den == 0:
            raise MeanError(f"denominator vanishes at ({mpmath.nstr(a, 10)}, {mpmath.nstr(b, 10)})")
        return num / den

    def _homogeneous(self, coeffs, degree, theta, sigma, order):
        u = LaurentSeries({0: 1, 1: theta}, order)
        v = LaurentSeries({0: 1, 1: sigma}, order)
        u_pow = [LaurentSeries.one(order)]
        v_pow = [LaurentSeries.one(order)]
        for _ in range(degree):
            u_pow.append(u_pow[-1] * u)
            v_pow.append(v_pow[-1] * v)
        total = LaurentSeries.zero(order)
        for k, c in enumerate(coeffs):
            total = total + (u_pow[k] * v_pow[degree - k]).scale(c)
        return total

    def _expand(self, theta, sigma, order):
        top = self._homogeneous(self.p, self.n, theta, sigma, order)
        bottom = self._homogeneous(self.q, self.n - 1, theta, sigma, order)
        return top * S.reciprocal(bottom)


@dataclass(frozen=True)
class SymmetricRationalMean(RationalMean):
    kind: ClassVar[str] = "symmetric_rational"

    def __post_init__(self):
        super().__post_init__()
        if self.p != self.p[::-1] or self.q != self.q[::-1]:
            raise MeanError("symmetric rational mean needs palindromic coefficient vectors")

    def is_symmetric(self):
        return True

    def map_coefficients(self, fn):
        return SymmetricRationalMean(tuple(fn(c) for c in self.p), tuple(fn(c) for c in self.q))

    def halves(self):
        """The S-form parameters (p_0..p_[n/2]; q_0..q_[(n−1)/2])."""
        return _fold(self.p, self.n), _fold(self.q, self.n - 1)


# ---------------------- CONSTRUCTORS ----------------------
def _unfold(half, degree: int) -> list:
    full = [None] * (degree + 1)
    for k, c in enumerate(half):
        c = coerce(c)
        if degree - 2 * k == 0:
            full[k] = 2 * c
        else:
            full[k] = full[degree - k] = c
    if any(c is None for c in full):
        raise MeanError(f"need {degree // 2 + 1} half coefficients for degree {degree}, got {len(half)}")
    return full


def _fold(full, degree: int) -> tuple:
    return tuple(full[k] / 2 if degree - 2 * k == 0 else full[k] for k in range(degree // 2 + 1))


def symmetric_rational(n: int, p_half, q_half) -> SymmetricRationalMean:
    """S^{n,n−1}: Σ p_k (ab)^k (a^(n−2k) + b^(n−2k)) over the analogous q-sum."""
    if n < 1:
        raise MeanError("degree n must be at least 1")
    return SymmetricRationalMean(tuple(_unfold(p_half, n)), tuple(_unfold(q_half, n - 1)))


def s21(p) -> SymmetricRationalMean:
    return symmetric_rational(2, [p, _HALF - coerce(p)], [_HALF])


def s32(p, q) -> SymmetricRationalMean:
    p, q = coerce(p), coerce(q)
    return symmetric_rational(3, [p, _HALF - p], [q, _HALF - q])


def s43(p, q, r) -> SymmetricRationalMean:
    p, q, r = coerce(p), coerce(q), coerce(r)
    return symmetric_rational(4, [p, q, _HALF - p - q], [r, _HALF - r])


def h21(p, q, r) -> RationalMean:
    """(p b² + q a² + (1−p−q) ab)/(r b + (1−r) a)."""
    p, q, r = coerce(p), coerce(q), coerce(r)
    return RationalMean((p, 1 - p - q, q), (r, 1 - r))


# ---------------------- OPERATIONS ----------------------
def eval_mean(m: MeanExpr, a, b, precision: int = DEFAULT_PRECISION):
    with mpmath.workprec(precision + 16):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        if a <= 0 or b <= 0:
            raise DomainError(f"means need positive arguments, got ({mpmath.nstr(a, 10)}, {mpmath.nstr(b, 10)})")
        if a == b and not isinstance(m, RationalMean):
            value = a
        else:
            value = m._evaluate(a, b, precision + 16)
    with mpmath.workprec(precision):
        return +value


def mean_series(m: MeanExpr, theta, sigma, order: int = S.DEFAULT_ORDER):
    """M(x+θ, x+σ)/x = M(1+θt, 1+σt) as a series with truncation order ``order + 1``."""
    if order < 1:
        raise MeanError("order must be at least 1")
    theta, sigma = coerce(theta), coerce(sigma)
    trunc = order + 1
    if theta == sigma:
        return LaurentSeries({0: 1, 1: theta}, trunc)
    result = m._expand(theta, sigma, trunc)
    return result.truncate(trunc)


@dataclass(frozen=True)
class MeanValidityReport:
    is_mean: bool
    witness: Optional[tuple]
    samples_checked: int


def is_mean_check(
    m: MeanExpr,
    ratios=None,
    tolerance_bits: int = DEFAULT_TOLERANCE_BITS,
    precision: int = DEFAULT_PRECISION,
) -> MeanValidityReport:
    """Scan ``min(a,b) ≤ M(a,b) ≤ max(a,b)`` at (1, ρ) and (ρ, 1)."""
    if ratios is None:
        ratios = np.geomspace(1.0, MAX_RATIO, num=DEFAULT_GRID_POINTS)
    samples = 0
    with mpmath.workprec(precision):
        slack = mpmath.ldexp(1, -tolerance_bits)
        for rho in ratios:
            rho = mpmath.mpf(float(rho))
            pairs = [(mpmath.mpf(1), rho)]
            if not m.is_symmetric():
                pairs.append((rho, mpmath.mpf(1)))
            for a, b in pairs:
                samples += 1
                lo, hi = min(a, b), max(a, b)
                try:
                    value = eval_mean(m, a, b, precision)
                except MeanError:
                    logger.info("mean undefined at (%s, %s)", mpmath.nstr(a, 10), mpmath.nstr(b, 10))
                    return MeanValidityReport(False, (a, b, mpmath.inf), samples)
                if value < lo - slack * hi or value > hi + slack * hi:
                    logger.info("mean violated at (%s, %s): %s", mpmath.nstr(a, 10), mpmath.nstr(b, 10), mpmath.nstr(value, 15))
                    return MeanValidityReport(False, (a, b, value), samples)
    return MeanValidityReport(True, None, samples)


def mean_partials_check(m: MeanExpr, c, h=None, precision: int = DEFAULT_PRECISION):
    """Central-difference partial derivatives of ``m`` at (c, c)."""
    with mpmath.workprec(precision):
        c = mpmath.mpf(c)
        if c <= 0:
            raise DomainError("partials need c > 0")
        h = mpmath.mpf(h) if h is not None else mpmath.ldexp(c, -(precision // 4))
        da = (eval_mean(m, c + h, c, precision) - eval_mean(m, c - h, c, precision)) / (2 * h)
        db = (eval_mean(m, c, c + h, precision) - eval_mean(m, c, c - h, precision)) / (2 * h)
    return da, db
