"""
Exact expansion of ln Γ and numeric reference evaluators for ln Γ, ψ and ψ^(n).
"""
from __future__ import annotations

import logging
import threading
from fractions import Fraction
from math import comb, factorial

import mpmath

from .exact import DEFAULT_PRECISION, to_float
from .exceptions import DomainError
from .series import LaurentSeries, LogAffine

logger = logging.getLogger(__name__)

GUARD_BITS = 20
MIN_SHIFT_TARGET = 40
MAX_POLYGAMMA_ORDER = 8

_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n with the B_1 = −1/2 convention."""
    if n < 0:
        raise ValueError(f"Bernoulli index must be nonnegative, got {n}")
    if n > 1 and n % 2:
        return Fraction(0)
    if n < len(_bernoulli_cache):
        return _bernoulli_cache[n]
    with _bernoulli_lock:
        while len(_bernoulli_cache) <= n:
            m = len(_bernoulli_cache)
            if m > 1 and m % 2:
                _bernoulli_cache.append(Fraction(0))
                continue
            total = sum(comb(m + 1, k) * _bernoulli_cache[k] for k in range(m) if _bernoulli_cache[k])
            _bernoulli_cache.append(-total / (m + 1))
    return _bernoulli_cache[n]


def lngamma_expansion(order: int) -> LogAffine:
    """ln Γ(x+1) − ½ln 2π as ``a(t)·ln x + b(t)``, exact through ``t^order``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    trunc = order + 1
    a = LaurentSeries({-1: 1, 0: Fraction(1, 2)}, trunc)
    b = {-1: -1}
    n = 1
    while 2 * n - 1 <= order:
        b[2 * n - 1] = bernoulli(2 * n) / (2 * n * (2 * n - 1))
        n += 1
    return LogAffine(a, LaurentSeries(b, trunc))


# ---------------------- NUMERIC REFERENCE ----------------------
def _as_mpf(x):
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, (int, float, str)):
        return mpmath.mpf(x)
    return to_float(x, mpmath.mp.prec)


def _is_nonpositive_integer(x) -> bool:
    return x <= 0 and x == mpmath.floor(x)


def _shift_count(z, precision: int) -> int:
    target = max(precision // 4, MIN_SHIFT_TARGET)
    return max(0, int(mpmath.ceil(target - z)))


def _stirling_lngamma(w, precision: int):
    """ln Γ(w) for large w by the truncated Stirling series."""
    total = (w - mpmath.mpf(1) / 2) * mpmath.log(w) - w + mpmath.log(2 * mpmath.pi) / 2
    eps = mpmath.ldexp(1, -precision)
    w_power = w
    w_sq = w * w
    n = 1
    while True:
        term = mpmath.fdiv(bernoulli(2 * n).numerator, bernoulli(2 * n).denominator) / (2 * n * (2 * n - 1) * w_power)
        total += term
        if abs(term) < eps * abs(total) or n > precision:
            break
        w_power *= w_sq
        n += 1
    return total


def lngamma_num(x, precision: int = DEFAULT_PRECISION):
    """ln Γ(x+1) to ``precision`` bits."""
    work = precision + GUARD_BITS
    with mpmath.workprec(work):
        x = _as_mpf(x)
        if x <= -1:
            raise DomainError(f"ln Γ(x+1) is undefined at x = {mpmath.nstr(x, 15)}")
        z = x + 1
        m = _shift_count(z, precision)
        value = _stirling_lngamma(z + m, work)
        if m:
            value -= mpmath.log(mpmath.fprod(z + j for j in range(m)))
    with mpmath.workprec(precision):
        return +value


def _psi_asymptotic(w, precision: int):
    total = mpmath.log(w) - 1 / (2 * w)
    eps = mpmath.ldexp(1, -precision)
    w_sq = w * w
    w_power = w_sq
    k = 1
    while True:
        term = mpmath.fdiv(bernoulli(2 * k).numerator, bernoulli(2 * k).denominator) / (2 * k * w_power)
        total -= term
        if abs(term) < eps * abs(total) or k > precision:
            break
        w_power *= w_sq
        k += 1
    return total


def psi_num(x, precision: int = DEFAULT_PRECISION):
    """Digamma ψ(x)."""
    work = precision + GUARD_BITS
    with mpmath.workprec(work):
        x = _as_mpf(x)
        if _is_nonpositive_integer(x):
            raise DomainError(f"ψ has a pole at x = {mpmath.nstr(x, 15)}")
        m = _shift_count(x, precision)
        value = _psi_asymptotic(x + m, work)
        if m:
            value -= mpmath.fsum(1 / (x + j) for j in range(m))
    with mpmath.workprec(precision):
        return +value


def _polygamma_asymptotic(n: int, w, precision: int):
    """(−1)^(n+1) [ (n−1)!/w^n + n!/(2w^(n+1)) + Σ B_2k (2k+n−1)!/((2k)! w^(2k+n)) ]."""
    eps = mpmath.ldexp(1, -precision)
    total = mpmath.mpf(factorial(n - 1)) / w ** n + mpmath.mpf(factorial(n)) / (2 * w ** (n + 1))
    w_sq = w * w
    w_power = w ** (n + 2)
    k = 1
    while True:
        coefficient = bernoulli(2 * k) * Fraction(factorial(2 * k + n - 1), factorial(2 * k))
        term = mpmath.fdiv(coefficient.numerator, coefficient.denominator) / w_power
        total += term
        if abs(term) < eps * abs(total) or k > precision:
            break
        w_power *= w_sq
        k += 1
    return total if n % 2 else -total


def polygamma_num(n: int, x, precision: int = DEFAULT_PRECISION):
    """ψ^(n)(x) for 0 ≤ n ≤ 8."""
    if n == 0:
        return psi_num(x, precision)
    if not 1 <= n <= MAX_POLYGAMMA_ORDER:
        raise DomainError(f"polygamma order must be in 0..{MAX_POLYGAMMA_ORDER}, got {n}")
    work = precision + GUARD_BITS
    with mpmath.workprec(work):
        x = _as_mpf(x)
        if _is_nonpositive_integer(x):
            raise DomainError(f"ψ^({n}) has a pole at x = {mpmath.nstr(x, 15)}")
        m = _shift_count(x, precision)
        value = _polygamma_asymptotic(n, x + m, work)
        if m:
            # ψ^(n)(x) = ψ^(n)(x+m) − (−1)^n n! Σ 1/(x+j)^(n+1)
            tail = mpmath.fsum(1 / (x + j) ** (n + 1) for j in range(m)) * factorial(n)
            value -= tail if n % 2 == 0 else -tail
    with mpmath.workprec(precision):
        return +value


def guo_qi_bounds(k: int, x, precision: int = DEFAULT_PRECISION):
    """Lower and upper bounds for (−1)^(k+1) ψ^(k)(x)."""
    if k < 1:
        raise DomainError("Guo–Qi bounds need k ≥ 1")
    with mpmath.workprec(precision):
        x = _as_mpf(x)
        if x <= 0:
            raise DomainError("Guo–Qi bounds need x > 0")
        head = mpmath.mpf(factorial(k - 1)) / x ** k
        tail = mpmath.mpf(factorial(k)) / x ** (k + 1)
        return head + tail / 2, head + tail
