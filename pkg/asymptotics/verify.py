"""
Numeric verification: convergence rates, sharp constants, double-inequality
sweeps and sign probes for the residuals f(x) = ln Γ(x+1) − ln F(x).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from math import factorial
from typing import Callable, Optional

import mpmath
import numpy as np

from .exact import DEFAULT_PRECISION, to_float
from .exceptions import DomainError, FormulaError, PrecisionWarning
from .formulas import Formula, RateClass, Shape, error_series, eval_formula, summarize_error
from .means import RationalMean
from .presets import get_preset
from .special import guo_qi_bounds, lngamma_num, polygamma_num, psi_num

logger = logging.getLogger(__name__)

NOISE_BITS = 24
DECIMAL_SLACK = mpmath.mpf("1e-9")
CLOSED_FORM_TOLERANCE = mpmath.mpf("1e-15")


# ---------------------- GRIDS ----------------------
def log_grid(lo, hi, n: int) -> list:
    return [mpmath.mpf(float(v)) for v in np.geomspace(float(lo), float(hi), num=int(n))]


def domain_grid(lo, hi, n: int) -> list:
    """Log-spaced points on [lo, hi]; lo may be zero or negative."""
    lo, hi = float(lo), float(hi)
    if lo > 0:
        return log_grid(lo, hi, n)
    offset = 1.0 - lo
    return [mpmath.mpf(float(v) - offset) for v in np.geomspace(lo + offset, hi + offset, num=int(n))]


def integer_grid(lo: int, hi: int) -> list:
    return [mpmath.mpf(k) for k in range(int(lo), int(hi) + 1)]


def _half_log_2pi():
    return mpmath.log(2 * mpmath.pi) / 2


def residual(f: Formula, x, precision: int = DEFAULT_PRECISION):
    """ln Γ(x+1) − ln F(x)."""
    with mpmath.workprec(precision):
        return lngamma_num(x, precision) - eval_formula(f, x, precision)


def _residual_at(f: Formula, point, precision: int):
    """Residual at a number, at "0+" or at "inf".

    The limit at 0+ is read off directly at h = 2^(−precision/2), with no
    extrapolation in h: residuals there are continuous but may carry h·ln h
    terms (identric mean), which defeat polynomial extrapolation, and at the
    default 256 bits the error of the direct value is about 2^(−128)·|ln h|.
    """
    if point == "inf":
        return mpmath.mpf(0)
    if point == "0+":
        return residual(f, mpmath.ldexp(1, -(precision // 2)), precision)
    return residual(f, mpmath.mpf(point), precision)


# ---------------------- RATES ----------------------
@dataclass(frozen=True)
class RateReport:
    preset: str
    exponent: int
    xs: tuple
    scaled: tuple
    extrapolated: object
    target: object = None
    target_value: object = None
    relative_deviation: object = None
    precision_warning: bool = False


def neville_at_zero(h: list, values: list):
    """Polynomial extrapolation of ``values(h)`` to h = 0."""
    p = list(values)
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m])
    return p[0]


def measure_rate(f: Formula, k: int, xs, precision: int = DEFAULT_PRECISION, target=None) -> RateReport:
    """Scaled residuals (ln Γ − ln F)·x^k and their extrapolated limit."""
    xs = [mpmath.mpf(x) for x in xs]
    if not xs or any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("sample points must be strictly increasing")
    if target is None:
        summary = summarize_error(error_series(f, max(k, 1)))
        if summary.rate_class is RateClass.POWER and summary.power == k:
            target = summary.coefficient
    flagged = False
    scaled = []
    with mpmath.workprec(precision):
        floor_scale = mpmath.ldexp(1, 16 - precision)
        for x in xs:
            lg = lngamma_num(x, precision)
            r = lg - eval_formula(f, x, precision)
            if abs(r) < floor_scale * max(abs(lg), 1):
                flagged = True
                warnings.warn(
                    f"{f.name}: residual at x={mpmath.nstr(x, 8)} is below the precision floor",
                    PrecisionWarning,
                    stacklevel=2,
                )
                logger.warning("%s: residual at x=%s is below the precision floor", f.name, mpmath.nstr(x, 8))
            scaled.append(r * x ** k)
        limit = neville_at_zero([1 / x for x in xs], scaled)
        target_value = to_float(target, precision) if target is not None else None
        deviation = None
        if target_value:
            deviation = abs(scaled[-1] - target_value) / abs(target_value)
    return RateReport(f.name, k, tuple(xs), tuple(scaled), limit, target, target_value, deviation, flagged)


# ---------------------- SHARP CONSTANTS ----------------------
CLOSED_FORMS = {
    "√2π": lambda: mpmath.sqrt(2 * mpmath.pi),
    "e": lambda: mpmath.e,
    "2^(3/4)e^(3/2)/3": lambda: mpmath.power(2, mpmath.mpf(3) / 4) * mpmath.exp(mpmath.mpf(3) / 2) / 3,
    "e³/8": lambda: mpmath.exp(3) / 8,
    "√(158e/69)": lambda: mpmath.sqrt(158 * mpmath.e / 69),
    "(1118e/1647)^(3/2)": lambda: mpmath.power(1118 * mpmath.e / 1647, mpmath.mpf(3) / 2),
    "e^(21/37)√2": lambda: mpmath.exp(mpmath.mpf(21) / 37) * mpmath.sqrt(2),
    "2√2e^(423/277)/(3√3)": lambda: 2 * mpmath.sqrt(2) * mpmath.exp(mpmath.mpf(423) / 277) / (3 * mpmath.sqrt(3)),
    "e^(2987/39960)√(2e)": lambda: mpmath.exp(mpmath.mpf(2987) / 39960) * mpmath.sqrt(2 * mpmath.e),
    "2√6·exp(829607/543240)/9": lambda: 2 * mpmath.sqrt(6) * mpmath.exp(mpmath.mpf(829607) / 543240) / 9,
}


@dataclass(frozen=True)
class SharpPoint:
    point: str
    label: str
    closed_form: Optional[str] = None
    printed: Optional[str] = None
    quantity: str = "ratio"


SHARP_POINTS = {
    "example1": (
        SharpPoint("1", "upper, n = 1", "2^(3/4)e^(3/2)/3", "2.5124"),
        SharpPoint("inf", "lower, x → ∞", "√2π", "2.5066"),
    ),
    "example2": (
        SharpPoint("0+", "upper, x → 0⁺", "e"),
        SharpPoint("1", "upper, n = 1", "e³/8"),
        SharpPoint("inf", "lower, x → ∞", "√2π", "2.5066"),
    ),
    "example3": (
        SharpPoint("0+", "lower, x → 0⁺", "√(158e/69)", "2.4949"),
        SharpPoint("1", "lower, n = 1", "(1118e/1647)^(3/2)"),
        SharpPoint("inf", "upper, x → ∞", "√2π", "2.5066"),
    ),
    "example4": (
        SharpPoint("0+", "lower, x → 0⁺", "e^(21/37)√2", "2.4946"),
        SharpPoint("1", "lower, n = 1", "2√2e^(423/277)/(3√3)", "2.5065"),
        SharpPoint("inf", "upper, x → ∞", "√2π", "2.5066"),
    ),
    "example5": (
        SharpPoint("0+", "upper, x → 0⁺", "e^(2987/39960)√(2e)"),
        SharpPoint("1", "upper, n = 1", "2√6·exp(829607/543240)/9", "2.5067"),
        SharpPoint("inf", "lower, x → ∞", "√2π", "2.5066"),
    ),
    "example6_m1": (
        SharpPoint("0+", "δ₀ = exp f(0⁺)", printed="0.96259", quantity="normalized"),
        SharpPoint("1", "δ₁ = exp f(1)", printed="0.99965", quantity="normalized"),
        SharpPoint("inf", "upper, x → ∞", printed="1", quantity="normalized"),
    ),
    "example6_m2": (
        SharpPoint("0+", "τ₀ = exp f(0⁺)", printed="1.0020", quantity="normalized"),
        SharpPoint("1", "τ₁ = exp f(1)", printed="1.0001", quantity="normalized"),
        SharpPoint("inf", "lower, x → ∞", printed="1", quantity="normalized"),
    ),
}


@dataclass(frozen=True)
class SharpConstant:
    point: str
    log_residual: object
    ratio: object
    normalized: object
    label: str = ""
    closed_form: Optional[str] = None
    expected: object = None
    printed: Optional[str] = None
    quantity: str = "ratio"
    matches: Optional[bool] = None


def _printed_matches(value, printed: str) -> bool:
    digits = -Decimal(printed).as_tuple().exponent
    ulp = mpmath.mpf(10) ** (-max(digits, 0))
    return abs(value - mpmath.mpf(printed)) <= ulp


def sharp_constants(f: Formula, points, precision: int = DEFAULT_PRECISION) -> list:
    """Γ(x+1)/core(x) = √2π·exp f(x) at each boundary point."""
    out = []
    with mpmath.workprec(precision):
        for point in points:
            spec = point if isinstance(point, SharpPoint) else SharpPoint(str(point), str(point))
            log_res = _residual_at(f, spec.point, precision)
            normalized = mpmath.exp(log_res)
            ratio = mpmath.sqrt(2 * mpmath.pi) * normalized
            value = ratio if spec.quantity == "ratio" else normalized
            expected = CLOSED_FORMS[spec.closed_form]() if spec.closed_form else None
            checks = []
            if expected is not None:
                checks.append(abs(value - expected) <= CLOSED_FORM_TOLERANCE * abs(expected))
            if spec.printed is not None:
                checks.append(_printed_matches(value, spec.printed))
            out.append(
                SharpConstant(
                    spec.point, log_res, ratio, normalized, spec.label, spec.closed_form,
                    expected, spec.printed, spec.quantity, all(checks) if checks else None,
                )
            )
    return out


def constants_table(name: str, precision: int = DEFAULT_PRECISION) -> list:
    """Registered boundary constants of a preset, evaluated and checked."""
    if name not in SHARP_POINTS:
        raise FormulaError(f"no sharp constants are registered for {name!r}; choose from {', '.join(SHARP_POINTS)}")
    return sharp_constants(get_preset(name), SHARP_POINTS[name], precision)


# ---------------------- DOUBLE INEQUALITIES ----------------------
@dataclass(frozen=True)
class Constant:
    """A bound constant C, compared in log scale; ``slack`` loosens truncated decimals."""

    label: str
    log_value: Callable
    slack: object = 0


def _exact_constant(label: str) -> Constant:
    return Constant(label, lambda precision: mpmath.log(CLOSED_FORMS[label]()))


def _decimal_constant(label: str, literal: str, side: str) -> Constant:
    def log_value(precision):
        value = mpmath.mpf(literal) + (DECIMAL_SLACK if side == "upper" else -DECIMAL_SLACK)
        return mpmath.log(value * mpmath.sqrt(2 * mpmath.pi))

    # margins are logarithmic, so the slack is relative to the constant
    return Constant(label, log_value, DECIMAL_SLACK / (mpmath.mpf(literal) - DECIMAL_SLACK))


def _residual_constant(label: str, preset: str, point) -> Constant:
    return Constant(label, lambda precision: _residual_at(get_preset(preset), point, precision) + _half_log_2pi())


@dataclass(frozen=True)
class BoundSpec:
    name: str
    description: str
    lower_core: str
    upper_core: str
    lower: Constant
    upper: Constant
    domain: str = "real"
    default_from: object = 1
    default_to: object = 100
    lower_attained: tuple = ()
    upper_attained: tuple = ()


_SQRT2PI = "√2π"


def _build_bounds() -> dict:
    specs = [
        BoundSpec(
            "ramanujan", "Ramanujan's double inequality, x ≥ 1",
            "ramanujan_lower", "ramanujan_upper",
            _exact_constant(_SQRT2PI), _exact_constant(_SQRT2PI), "real", 1, 100,
        ),
        BoundSpec(
            "batir2", "Batir's double inequality, x > 0",
            "batir2", "batir2",
            Constant("√2e^(4/9)", lambda p: mpmath.log(2) / 2 + mpmath.mpf(4) / 9),
            _exact_constant(_SQRT2PI), "real", mpmath.mpf("1e-3"), 50,
        ),
        BoundSpec(
            "mortici_omega", "Mortici's ω-inequality with α = 1.072042464, x ≥ 0",
            "mortici_omega", "mortici_omega",
            _exact_constant(_SQRT2PI), _decimal_constant("α√2π", "1.072042464", "upper"), "real", 0, 50,
            upper_attained=(0,),
        ),
        BoundSpec(
            "mortici_sigma", "Mortici's ς-inequality with β = 0.988503589, x ≥ 0",
            "mortici_sigma", "mortici_sigma",
            _decimal_constant("β√2π", "0.988503589", "lower"), _exact_constant(_SQRT2PI), "real", 0, 50,
            lower_attained=(0,),
        ),
        BoundSpec(
            "example1_int", "A^(2/3)G^(1/3) mean, integers n ≥ 1",
            "example1", "example1",
            _exact_constant(_SQRT2PI), _exact_constant("2^(3/4)e^(3/2)/3"), "integer", 1, 50,
            upper_attained=(1,),
        ),
        BoundSpec(
            "example2_real", "identric mean, x > 0",
            "example2", "example2",
            _exact_constant(_SQRT2PI), _exact_constant("e"), "real", mpmath.mpf("1e-3"), 50,
        ),
        BoundSpec(
            "example2_int", "identric mean, integers n ≥ 1",
            "example2", "example2",
            _exact_constant(_SQRT2PI), _exact_constant("e³/8"), "integer", 1, 50,
            upper_attained=(1,),
        ),
        BoundSpec(
            "example3_real", "S^{3,2} base mean, x > 0",
            "example3", "example3",
            _exact_constant("√(158e/69)"), _exact_constant(_SQRT2PI), "real", mpmath.mpf("1e-3"), 50,
        ),
        BoundSpec(
            "example3_int", "S^{3,2} base mean, integers n ≥ 1",
            "example3", "example3",
            _exact_constant("(1118e/1647)^(3/2)"), _exact_constant(_SQRT2PI), "integer", 1, 50,
            lower_attained=(1,),
        ),
        BoundSpec(
            "example4_real", "S^{3,2} subtracted mean, x > 0",
            "example4", "example4",
            _exact_constant("e^(21/37)√2"), _exact_constant(_SQRT2PI), "real", mpmath.mpf("1e-3"), 50,
        ),
        BoundSpec(
            "example4_int", "S^{3,2} subtracted mean, integers n ≥ 1",
            "example4", "example4",
            _exact_constant("2√2e^(423/277)/(3√3)"), _exact_constant(_SQRT2PI), "integer", 1, 50,
            lower_attained=(1,),
        ),
        BoundSpec(
            "example5_real", "S^{4,3} subtracted mean, x > 0",
            "example5", "example5",
            _exact_constant(_SQRT2PI), _exact_constant("e^(2987/39960)√(2e)"), "real", mpmath.mpf("1e-3"), 50,
        ),
        BoundSpec(
            "example5_int", "S^{4,3} subtracted mean, integers n ≥ 1",
            "example5", "example5",
            _exact_constant(_SQRT2PI), _exact_constant("2√6·exp(829607/543240)/9"), "integer", 1, 50,
            upper_attained=(1,),
        ),
    ]
    for preset, lower_side in (("example6_m1", True), ("example6_m2", False)):
        symbol = "δ" if lower_side else "τ"
        zero = _residual_constant(f"{symbol}₀√2π", preset, "0+")
        one = _residual_constant(f"{symbol}₁√2π", preset, 1)
        sqrt2pi = _exact_constant(_SQRT2PI)
        specs.append(
            BoundSpec(
                f"{preset}_real", f"H^{{2,1}} mean branch {preset[-1]}, x > 0",
                preset, preset,
                zero if lower_side else sqrt2pi, sqrt2pi if lower_side else zero,
                "real", mpmath.mpf("1e-3"), 50,
            )
        )
        specs.append(
            BoundSpec(
                f"{preset}_int", f"H^{{2,1}} mean branch {preset[-1]}, integers n ≥ 1",
                preset, preset,
                one if lower_side else sqrt2pi, sqrt2pi if lower_side else one,
                "integer", 1, 50,
                lower_attained=(1,) if lower_side else (),
                upper_attained=() if lower_side else (1,),
            )
        )
    return {s.name: s for s in specs}


BOUNDS = _build_bounds()


@dataclass(frozen=True)
class BoundRow:
    x: object
    lower_margin: object
    upper_margin: object
    status: str


@dataclass(frozen=True)
class BoundReport:
    name: str
    description: str
    passed: bool
    rows: tuple
    min_margin: object
    min_margin_at: object
    min_margin_side: str
    failures: int


def default_grid(spec: BoundSpec, lo=None, hi=None, n: Optional[int] = None) -> list:
    lo = spec.default_from if lo is None else lo
    hi = spec.default_to if hi is None else hi
    if spec.domain == "integer":
        return integer_grid(int(lo), int(hi))
    return domain_grid(lo, hi, n or 200)


def _side_status(margin, attained: bool, noise, slack) -> bool:
    if attained:
        return -noise <= margin <= 2 * slack + noise
    return margin > noise


def inequality_sweep(spec: BoundSpec, grid=None, precision: int = DEFAULT_PRECISION) -> BoundReport:
    """Check lower < Γ(x+1)/core(x) < upper on the grid (log scale)."""
    grid = default_grid(spec) if grid is None else [mpmath.mpf(x) for x in grid]
    lower_core, upper_core = get_preset(spec.lower_core), get_preset(spec.upper_core)
    rows = []
    failures = 0
    best = (mpmath.inf, None, "")
    with mpmath.workprec(precision):
        log_lower = spec.lower.log_value(precision)
        log_upper = spec.upper.log_value(precision)
        half = _half_log_2pi()
        for x in grid:
            lg = lngamma_num(x, precision)
            noise = mpmath.ldexp(1, NOISE_BITS - precision) * max(1, abs(lg))
            g_low = lg - (eval_formula(lower_core, x, precision) - half)
            g_up = g_low if upper_core is lower_core else lg - (eval_formula(upper_core, x, precision) - half)
            low_margin = g_low - log_lower
            up_margin = log_upper - g_up
            low_ok = _side_status(low_margin, x in spec.lower_attained, noise, spec.lower.slack)
            up_ok = _side_status(up_margin, x in spec.upper_attained, noise, spec.upper.slack)
            attained = x in spec.lower_attained or x in spec.upper_attained
            if low_ok and up_ok:
                status = "attained" if attained else "ok"
            else:
                status = "fail"
                failures += 1
            rows.append(BoundRow(x, low_margin, up_margin, status))
            if x not in spec.lower_attained and low_margin < best[0]:
                best = (low_margin, x, "lower")
            if x not in spec.upper_attained and up_margin < best[0]:
                best = (up_margin, x, "upper")
    passed = failures == 0
    logger.info("bounds %s: %s on %d points", spec.name, "PASS" if passed else "FAIL", len(rows))
    return BoundReport(spec.name, spec.description, passed, tuple(rows), best[0], best[1], best[2], failures)


def get_bound(name: str) -> BoundSpec:
    try:
        return BOUNDS[name]
    except KeyError:
        raise FormulaError(f"unknown bound {name!r}; choose from {', '.join(BOUNDS)}, guo_qi") from None


def guo_qi_sweep(k: int, grid=None, precision: int = DEFAULT_PRECISION) -> BoundReport:
    """Relative margins of the Guo–Qi bracket around (−1)^(k+1) ψ^(k)(x)."""
    grid = log_grid(mpmath.mpf("0.1"), 1000, 200) if grid is None else [mpmath.mpf(x) for x in grid]
    rows = []
    failures = 0
    best = (mpmath.inf, None, "")
    with mpmath.workprec(precision):
        noise = mpmath.ldexp(1, NOISE_BITS - precision)
        for x in grid:
            value = (-1) ** (k + 1) * polygamma_num(k, x, precision)
            low, high = guo_qi_bounds(k, x, precision)
            low_margin = (value - low) / value
            up_margin = (high - value) / value
            ok = low_margin > noise and up_margin > noise
            failures += not ok
            rows.append(BoundRow(x, low_margin, up_margin, "ok" if ok else "fail"))
            for margin, side in ((low_margin, "lower"), (up_margin, "upper")):
                if margin < best[0]:
                    best = (margin, x, side)
    return BoundReport(f"guo_qi_k{k}", f"Guo–Qi bracket of (−1)^(k+1)ψ^(k), k = {k}", failures == 0,
                       tuple(rows), best[0], best[1], best[2], failures)


# ---------------------- DERIVATIVE PROBES ----------------------
def _y(x):
    return x + mpmath.mpf(1) / 2


def _f1(x, p):
    y = _y(x)
    d1 = (psi_num(x + 1, p) - mpmath.mpf(2) / 3 * mpmath.log(y) - mpmath.log(x) / 6 - mpmath.log(x + 1) / 6
          - 1 / (12 * x) + 1 / (12 * (x + 1)))
    d2 = (polygamma_num(1, x + 1, p) - 2 / (3 * y) - 1 / (6 * x) - 1 / (6 * (x + 1))
          + 1 / (12 * x ** 2) - 1 / (12 * (x + 1) ** 2))
    return d1, d2


def _f2(x, p):
    d1 = psi_num(x + 1, p) - (2 * x + mpmath.mpf(3) / 2) * mpmath.log(x + 1) + (2 * x + mpmath.mpf(1) / 2) * mpmath.log(x) + 2
    d2 = (polygamma_num(1, x + 1, p) - 2 * mpmath.log(x + 1) + 2 * mpmath.log(x)
          + 1 / (2 * (x + 1)) + 1 / (2 * x))
    return d1, d2


def _f3(x, p):
    y = _y(x)
    dp = x ** 2 + x + mpmath.mpf(23) / 80
    dq = x ** 2 + x + mpmath.mpf(79) / 240
    d1 = (psi_num(x + 1, p) + mpmath.log(dq) - mpmath.log(dp) - mpmath.log(y)
          - 2 * y ** 2 / dp + 2 * y ** 2 / dq)
    d2 = (polygamma_num(1, x + 1, p) - 1 / y - 6 * y / dp + 6 * y / dq
          + 4 * y ** 3 / dp ** 2 - 4 * y ** 3 / dq ** 2)
    return d1, d2


def _f4(x, p):
    y = _y(x)
    d = x ** 2 + x + mpmath.mpf(37) / 120
    d1 = psi_num(x + 1, p) - mpmath.log(y) + 1 / (24 * d) - y ** 2 / (12 * d ** 2)
    d2 = polygamma_num(1, x + 1, p) - 1 / y - y / (4 * d ** 2) + y ** 3 / (3 * d ** 3)
    return d1, d2


def _f5(x, p):
    y = _y(x)
    e = x ** 2 + x + mpmath.mpf(111) / 196
    d1 = (psi_num(x + 1, p) - mpmath.log(y) - mpmath.mpf(1517) / (44640 * y ** 2)
          + mpmath.mpf(343) / (44640 * e) - 343 * y ** 2 / (22320 * e ** 2))
    d2 = (polygamma_num(1, x + 1, p) - 1 / y + mpmath.mpf(1517) / (22320 * y ** 3)
          - 343 * y / (7440 * e ** 2) + 343 * y ** 3 / (5580 * e ** 3))
    return d1, d2


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return out


def _homogeneous_poly(coeffs, degree: int, theta, sigma) -> list:
    """Σ c_k (x+θ)^k (x+σ)^(degree−k) as ascending coefficients in x."""
    total = [Fraction(0)] * (degree + 1)
    for k, c in enumerate(coeffs):
        term = [c]
        for _ in range(k):
            term = _poly_mul(term, [theta, Fraction(1)])
        for _ in range(degree - k):
            term = _poly_mul(term, [sigma, Fraction(1)])
        total = [u + v for u, v in zip(total, term)]
    return total


def _poly_derivative(a: list) -> list:
    return [k * c for k, c in enumerate(a)][1:] or [Fraction(0)]


def _horner(coeffs: list, x):
    total = mpmath.mpf(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


class RationalMeanDerivatives:
    """f', f'' of f(x) = ln Γ(x+1) − ½ln 2π − (x+½)ln M + M with M = P/Q exact polynomials."""

    def __init__(self, f: Formula):
        mean = f.base.mean
        if f.shape is not Shape.SHIFTED_MEAN or not isinstance(mean, RationalMean) or f.corrections:
            raise FormulaError(f"{f.name}: exact derivatives need a shifted_mean rational-mean formula")
        theta, sigma = f.base.shifts
        self.P = _homogeneous_poly(mean.p, mean.n, theta, sigma)
        self.Q = _homogeneous_poly(mean.q, mean.n - 1, theta, sigma)

    def __call__(self, x, precision: int):
        def floats(poly):
            return [to_float(c, precision) for c in poly]

        P, Q = floats(self.P), floats(self.Q)
        P1, Q1 = floats(_poly_derivative(self.P)), floats(_poly_derivative(self.Q))
        P2, Q2 = floats(_poly_derivative(_poly_derivative(self.P))), floats(_poly_derivative(_poly_derivative(self.Q)))
        p, q = _horner(P, x), _horner(Q, x)
        p1, q1 = _horner(P1, x), _horner(Q1, x)
        p2, q2 = _horner(P2, x), _horner(Q2, x)
        m = p / q
        m1 = (p1 * q - p * q1) / q ** 2
        m2 = ((p2 * q - p * q2) * q - 2 * q1 * (p1 * q - p * q1)) / q ** 3
        y = _y(x)
        d1 = psi_num(x + 1, precision) - mpmath.log(m) - y * m1 / m + m1
        d2 = polygamma_num(1, x + 1, precision) - 2 * m1 / m - y * (m2 * m - m1 ** 2) / m ** 2 + m2
        return d1, d2


@dataclass(frozen=True)
class ProbeTarget:
    name: str
    preset: str
    domain_floor: object
    signs: dict
    completely_monotone: bool = False
    recurrence_sign: Optional[int] = None
    stated_signs: Optional[dict] = None
    default_from: object = None
    default_to: object = 50


PROBE_TARGETS = {
    "f1": ProbeTarget("f1", "example1", 0, {0: 1, 1: -1, 2: 1}, True, default_from=mpmath.mpf("0.1"), default_to=100),
    "f2": ProbeTarget("f2", "example2", 0, {0: 1, 1: -1, 2: 1}, True, default_from=mpmath.mpf("0.1"), default_to=100),
    "f3": ProbeTarget("f3", "example3", mpmath.mpf(-1) / 2, {1: 1, 2: -1}, recurrence_sign=1, default_from=mpmath.mpf("-0.4")),
    "f4": ProbeTarget(
        "f4", "example4", mpmath.mpf(-1) / 2, {1: 1, 2: -1}, recurrence_sign=1,
        stated_signs={1: 1, 2: 1}, default_from=mpmath.mpf("-0.4"),
    ),
    "f5": ProbeTarget("f5", "example5", mpmath.mpf(-1) / 2, {1: -1, 2: 1}, recurrence_sign=-1, default_from=mpmath.mpf("-0.4")),
    "f6": ProbeTarget("f6", "example6_m1", 0, {1: 1, 2: -1}, recurrence_sign=1, default_from=mpmath.mpf("0.05")),
    "f7": ProbeTarget("f7", "example6_m2", 0, {1: -1, 2: 1}, recurrence_sign=-1, default_from=mpmath.mpf("0.05")),
}

_CLOSED_DERIVATIVES = {"f1": _f1, "f2": _f2, "f3": _f3, "f4": _f4, "f5": _f5}

_STENCILS = {
    1: ((-3, -1), (-2, 9), (-1, -45), (1, 45), (2, -9), (3, 1)),
    2: ((-3, 2), (-2, -27), (-1, 270), (0, -490), (1, 270), (2, -27), (3, 2)),
}
_STENCIL_DENOMINATORS = {1: 60, 2: 180}


def get_probe_target(name: str) -> ProbeTarget:
    try:
        return PROBE_TARGETS[name]
    except KeyError:
        raise FormulaError(f"unknown probe target {name!r}; choose from {', '.join(PROBE_TARGETS)}") from None


def _stencil(fn: Callable, x, order: int, h):
    total = mpmath.fsum(w * fn(x + j * h) for j, w in _STENCILS[order])
    return total / (_STENCIL_DENOMINATORS[order] * h ** order)


def _stencil_step(order: int, precision: int):
    return mpmath.ldexp(1, -(precision // (order + 2)))


class _Residual:
    """Value and derivatives of one residual function."""

    def __init__(self, target, precision: int):
        self.precision = precision
        if isinstance(target, Formula):
            self.formula = target
            self.closed = None
        else:
            self.formula = get_preset(target.preset)
            if target.name in _CLOSED_DERIVATIVES:
                self.closed = _CLOSED_DERIVATIVES[target.name]
            else:
                derivatives = RationalMeanDerivatives(self.formula)
                self.closed = lambda x, p: derivatives(x, p)

    def value(self, x):
        return residual(self.formula, x, self.precision)

    def second(self, x):
        return self.closed(x, self.precision)[1]

    def derivative(self, x, n: int):
        """(value, noise floor) of f^(n)(x)."""
        p = self.precision
        if n == 0:
            return self.value(x), mpmath.ldexp(1, NOISE_BITS - p) * max(1, abs(lngamma_num(x, p)))
        if self.closed is None:
            if n > 2:
                raise FormulaError("custom formulas are probed up to order 2")
            h = _stencil_step(n, p)
            return _stencil(self.value, x, n, h), mpmath.ldexp(1, 40 - p) / h ** n
        if n <= 2:
            return self.closed(x, p)[n - 1], mpmath.ldexp(1, NOISE_BITS - p)
        if n > 4:
            raise FormulaError("derivative probes stop at order 4")
        h = _stencil_step(n, p)
        return _stencil(self.second, x, n - 2, h), mpmath.ldexp(1, 40 - p) / h ** (n - 2)


def residual_derivatives(name: str, x, precision: int = DEFAULT_PRECISION) -> tuple:
    """(f'(x), f''(x)) of a registered residual function."""
    evaluator = _Residual(get_probe_target(name), precision)
    with mpmath.workprec(precision):
        return evaluator.closed(mpmath.mpf(x), precision)


@dataclass(frozen=True)
class ProbeRow:
    x: object
    value: object
    sign: int
    status: str


@dataclass(frozen=True)
class ProbeReport:
    target: str
    order: int
    expected_sign: int
    rows: tuple
    verdict: str
    note: str = ""
    kind: str = "derivative"

    @property
    def passed(self) -> bool:
        return self.verdict != "counterexample"


@dataclass(frozen=True)
class ProbeSpec:
    target: object
    order: int
    grid: tuple = ()
    expected_sign: Optional[int] = None


def probe_grid(target: ProbeTarget, lo=None, hi=None, n: int = 40) -> list:
    lo = target.default_from if lo is None else mpmath.mpf(lo)
    hi = target.default_to if hi is None else mpmath.mpf(hi)
    if lo <= target.domain_floor:
        raise DomainError(f"{target.name}: grid must stay above {mpmath.nstr(target.domain_floor, 5)}")
    return domain_grid(lo, hi, n)


def _verdict(rows) -> str:
    statuses = {r.status for r in rows}
    if "counterexample" in statuses:
        return "counterexample"
    if "ok" not in statuses:
        return "inconclusive"
    return "consistent"


def _classify(value, noise, expected: int) -> tuple:
    sign = 1 if value > 0 else (-1 if value < 0 else 0)
    if abs(value) <= noise:
        return sign, "indeterminate"
    return sign, "ok" if sign == expected else "counterexample"


def derivative_probe(spec: ProbeSpec, precision: int = DEFAULT_PRECISION) -> ProbeReport:
    """Sign of f^(n) on the grid."""
    if isinstance(spec.target, Formula):
        target = None
        label = spec.target.name
        evaluator = _Residual(spec.target, precision + 20)
        expected = spec.expected_sign
        if expected is None:
            raise FormulaError("custom formula probes need an expected sign")
        grid = list(spec.grid)
    else:
        target = get_probe_target(spec.target)
        label = target.name
        evaluator = _Residual(target, precision + 20)
        expected = spec.expected_sign if spec.expected_sign is not None else target.signs.get(spec.order)
        if expected is None:
            expected = (-1) ** spec.order if target.completely_monotone else None
        if expected is None:
            raise FormulaError(f"{label}: no expected sign for order {spec.order}")
        grid = list(spec.grid) or probe_grid(target)
    rows = []
    with mpmath.workprec(precision + 20):
        for x in grid:
            x = mpmath.mpf(x)
            value, noise = evaluator.derivative(x, spec.order)
            sign, status = _classify(value, noise, expected)
            rows.append(ProbeRow(x, value, sign, status))
    note = ""
    if target is not None and target.stated_signs and target.stated_signs.get(spec.order) not in (None, expected):
        note = (f"{label}: measured sign {expected:+d} at order {spec.order} differs from the stated "
                f"{target.stated_signs[spec.order]:+d}")
        logger.warning(note)
    report = ProbeReport(label, spec.order, expected, tuple(rows), _verdict(rows), note)
    logger.info("probe %s order %d: %s", label, spec.order, report.verdict)
    return report


@dataclass(frozen=True)
class MonotonicityReport:
    target: str
    reports: tuple
    verdict: str

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def complete_monotonicity_probe(which: str, max_order: int = 3, grid=None, precision: int = DEFAULT_PRECISION):
    """(−1)^n f^(n) ≥ 0 for n = 0..max_order; corroboration only."""
    target = get_probe_target(which)
    if not target.completely_monotone:
        raise FormulaError(f"{which} is not claimed to be completely monotone")
    if max_order > 4:
        raise FormulaError("complete monotonicity is probed up to order 4")
    grid = tuple(grid) if grid is not None else tuple(probe_grid(target))
    reports = tuple(
        derivative_probe(ProbeSpec(which, n, grid, (-1) ** n), precision) for n in range(max_order + 1)
    )
    failed = [r.order for r in reports if not r.passed]
    if failed:
        verdict = f"counterexample at order {failed[0]}"
    else:
        verdict = f"consistent with complete monotonicity through order {max_order}"
    return MonotonicityReport(which, reports, verdict)


def recurrence_difference_probe(which: str, grid=None, precision: int = DEFAULT_PRECISION) -> ProbeReport:
    """Sign of f''(x+1) − f''(x)."""
    target = get_probe_target(which)
    if target.recurrence_sign is None:
        raise FormulaError(f"no recurrence-difference sign is registered for {which}")
    evaluator = _Residual(target, precision + 20)
    grid = list(grid) if grid is not None else probe_grid(target)
    rows = []
    with mpmath.workprec(precision + 20):
        noise = mpmath.ldexp(1, NOISE_BITS - precision)
        for x in grid:
            x = mpmath.mpf(x)
            value = evaluator.second(x + 1) - evaluator.second(x)
            sign, status = _classify(value, noise, target.recurrence_sign)
            rows.append(ProbeRow(x, value, sign, status))
    return ProbeReport(which, 2, target.recurrence_sign, tuple(rows), _verdict(rows), kind="recurrence")


def monotonicity_crosscheck(which: str, grid=None, precision: int = DEFAULT_PRECISION) -> ProbeReport:
    """Direct values f(x_i) ordered as the sign of f' predicts."""
    target = get_probe_target(which)
    evaluator = _Residual(target, precision + 20)
    grid = list(grid) if grid is not None else probe_grid(target, lo=max(target.default_from, mpmath.mpf("0.1")))
    grid = [mpmath.mpf(x) for x in grid if x > 0]
    expected = target.signs[1]
    rows = []
    with mpmath.workprec(precision + 20):
        values = [evaluator.value(x) for x in grid]
        noise = mpmath.ldexp(1, 40 - precision)
        for x, v0, v1 in zip(grid, values, values[1:]):
            sign, status = _classify(v1 - v0, noise * max(1, abs(v0)), expected)
            rows.append(ProbeRow(x, v1 - v0, sign, status))
    return ProbeReport(which, 1, expected, tuple(rows), _verdict(rows), kind="crosscheck")


def u_series_signs(n_from: int = 3, n_to: int = 10) -> list:
    """Coefficients ((2n−3)·2^(2n−2) − 4)/(2n−1)! of t^(2n−1) and their signs."""
    out = []
    for n in range(n_from, n_to + 1):
        c = Fraction((2 * n - 3) * 2 ** (2 * n - 2) - 4, factorial(2 * n - 1))
        out.append((n, c, c > 0))
    return out


def wilker_probe(grid=None, precision: int = DEFAULT_PRECISION) -> ProbeReport:
    """(t/sinh t)² + t/tanh t − 2 > 0 on the grid."""
    grid = log_grid(mpmath.mpf("1e-3"), 20, 60) if grid is None else [mpmath.mpf(t) for t in grid]
    rows = []
    with mpmath.workprec(precision):
        noise = mpmath.ldexp(1, NOISE_BITS - precision)
        for t in grid:
            value = (t / mpmath.sinh(t)) ** 2 + t / mpmath.tanh(t) - 2
            sign, status = _classify(value, noise, 1)
            rows.append(ProbeRow(t, value, sign, status))
    return ProbeReport("wilker", 0, 1, tuple(rows), _verdict(rows), kind="wilker")
