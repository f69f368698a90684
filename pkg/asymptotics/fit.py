"""
Symbolic fitting of mean parameters.

The error series of a template formula is computed with polynomial
coefficients in the unknowns; its coefficients are then driven to zero one
power at a time by sequential elimination.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import QuadExt, coerce, format_exact, invert, is_exact_rational, simplify, square_root
from .exceptions import ExactArithmeticError, SeriesError, UnsupportedFit
from .formulas import (
    Formula,
    MeanSlot,
    RateClass,
    Shape,
    error_series,
    summarize_error,
)
from .means import Arithmetic, RationalMean, symmetric_rational

logger = logging.getLogger(__name__)

MAX_UNKNOWNS = 6
MAX_TARGET_ORDER = 13


# ---------------------- POLYNOMIALS ----------------------
def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    powers = dict(m1)
    for var, e in m2:
        powers[var] = powers.get(var, 0) + e
    return tuple(sorted(powers.items()))


class SymbolicPoly:
    """Multivariate polynomial over named unknowns with exact coefficients.

    A monomial is a sorted tuple of ``(name, exponent)`` pairs; the empty tuple
    is the constant monomial.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(sorted((str(v), int(e)) for v, e in mono if int(e) != 0))
            clean[mono] = clean.get(mono, 0) + coerce(c)
        self._terms = {m: simplify(c) for m, c in clean.items() if c != 0}

    @classmethod
    def _raw(cls, terms: dict) -> "SymbolicPoly":
        obj = cls.__new__(cls)
        obj._terms = {m: simplify(c) for m, c in terms.items() if c != 0}
        return obj

    @classmethod
    def variable(cls, name: str) -> "SymbolicPoly":
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def constant(cls, value) -> "SymbolicPoly":
        return cls._raw({(): coerce(value)})

    @staticmethod
    def _lift(other):
        if isinstance(other, SymbolicPoly):
            return other
        if isinstance(other, (int, Fraction, QuadExt)) and not isinstance(other, bool):
            return SymbolicPoly.constant(other)
        return None

    # -- inspection --
    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_value(self):
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self._terms), default=0)

    def coefficients_in(self, name: str) -> dict:
        """Split into ``{power of name: coefficient polynomial}``."""
        parts: dict = {}
        for mono, c in self._terms.items():
            powers = dict(mono)
            e = powers.pop(name, 0)
            parts.setdefault(e, {})[tuple(sorted(powers.items()))] = c
        return {e: SymbolicPoly._raw(t) for e, t in parts.items()}

    def items(self):
        return self._terms.items()

    # -- substitution --
    def substitute(self, mapping: dict) -> "SymbolicPoly":
        if not mapping or not (self.variables() & set(mapping)):
            return self
        lifted = {v: self._lift(coerce(value)) for v, value in mapping.items()}
        cache: dict = {}
        result = SymbolicPoly()
        for mono, c in self._terms.items():
            term = SymbolicPoly._raw({(): c})
            rest = []
            for var, e in mono:
                if var in lifted:
                    key = (var, e)
                    if key not in cache:
                        cache[key] = lifted[var] ** e
                    term = term * cache[key]
                else:
                    rest.append((var, e))
            if rest:
                term = term * SymbolicPoly._raw({tuple(rest): Fraction(1)})
            result = result + term
        return result

    def evaluate(self, values: dict):
        reduced = self.substitute(values)
        if not reduced.is_constant():
            missing = sorted(reduced.variables())
            raise UnsupportedFit(f"no values for unknowns {', '.join(missing)}")
        return simplify(reduced.constant_value())

    def inverse(self) -> "SymbolicPoly":
        if not self.is_constant() or self.is_zero():
            raise SeriesError(f"{self} is not a nonzero constant")
        return SymbolicPoly.constant(invert(self.constant_value()))

    # -- arithmetic --
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in o._terms.items():
            terms[m] = terms.get(m, 0) + c
        return SymbolicPoly._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = _mono_mul(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return SymbolicPoly._raw(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o.is_constant() or o.is_zero():
            raise UnsupportedFit(f"cannot divide by the non-constant polynomial {o}")
        factor = invert(o.constant_value())
        return SymbolicPoly._raw({m: c * factor for m, c in self._terms.items()})

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = SymbolicPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"SymbolicPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        ordered = sorted(self._terms.items(), key=lambda mc: (-sum(e for _, e in mc[0]), mc[0]))
        out = []
        for mono, c in ordered:
            mono_text = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if is_exact_rational(c):
                negative = c < 0
                magnitude = -c if negative else c
                coeff = "" if (magnitude == 1 and mono_text) else str(magnitude)
            else:
                negative = False
                coeff = format_exact(c)
            text = f"{coeff}*{mono_text}" if coeff and mono_text else (coeff or mono_text)
            if not out:
                out.append(f"-{text}" if negative else text)
            else:
                out.append(f" - {text}" if negative else f" + {text}")
        return "".join(out)


def as_poly(value) -> SymbolicPoly:
    lifted = SymbolicPoly._lift(coerce(value))
    if lifted is None:
        raise TypeError(f"cannot treat {type(value).__name__} as a polynomial")
    return lifted


# ---------------------- TEMPLATES ----------------------
@dataclass(frozen=True)
class FitTemplate:
    name: str
    formula: Formula
    unknowns: tuple
    target_order: int

    def __post_init__(self):
        object.__setattr__(self, "unknowns", tuple(self.unknowns))
        if len(self.unknowns) > MAX_UNKNOWNS:
            raise UnsupportedFit(f"{self.name}: at most {MAX_UNKNOWNS} unknowns are supported")
        if len(set(self.unknowns)) != len(self.unknowns):
            raise UnsupportedFit(f"{self.name}: duplicate unknown names")
        if not 1 <= self.target_order <= MAX_TARGET_ORDER:
            raise UnsupportedFit(f"{self.name}: target order must be in 1..{MAX_TARGET_ORDER}")


def family_template(kind: str, slot: str, n: int) -> FitTemplate:
    """S^{n,n−1} (kind "symmetric") or H^{n,n−1} (kind "general") fitting template.

    One coefficient per vector is fixed by the normalization: the last half
    entry for S, the middle numerator entry and the last denominator entry for H.
    """
    if n < 2:
        raise UnsupportedFit("family templates need n ≥ 2")
    var = SymbolicPoly.variable
    unit = (Fraction(0), Fraction(1))
    arithmetic = MeanSlot(Arithmetic(), unit)
    if kind == "symmetric":
        p_names = [f"p{k}" for k in range(n // 2)]
        q_names = [f"q{k}" for k in range((n - 1) // 2)]
        p_half = [var(v) for v in p_names]
        q_half = [var(v) for v in q_names]
        p_half.append(Fraction(1, 2) - sum(p_half, SymbolicPoly()))
        q_half.append(Fraction(1, 2) - sum(q_half, SymbolicPoly()))
        mean = MeanSlot(symmetric_rational(n, p_half, q_half), unit)
        if slot == "M":
            formula = Formula(f"S{n}_M", Shape.SYMMETRIC_PAIR, base=mean, subtrahend=arithmetic)
        elif slot == "N":
            formula = Formula(f"S{n}_N", Shape.SYMMETRIC_PAIR, base=arithmetic, subtrahend=mean)
        else:
            raise UnsupportedFit(f"slot must be 'M' or 'N', got {slot!r}")
        return FitTemplate(f"symmetric_n{n}_{slot}", formula, tuple(p_names + q_names), min(2 * n + 1, MAX_TARGET_ORDER))
    if kind == "general":
        if slot != "M":
            raise UnsupportedFit("general rational means are fitted in the M slot only")
        middle = n // 2
        p_names = [f"p{k}" for k in range(n + 1) if k != middle]
        q_names = [f"q{k}" for k in range(n - 1)]
        p = [var(f"p{k}") if k != middle else None for k in range(n + 1)]
        p[middle] = 1 - sum((c for c in p if c is not None), SymbolicPoly())
        q = [var(v) for v in q_names]
        q.append(1 - sum(q, SymbolicPoly()))
        formula = Formula(f"H{n}", Shape.SHIFTED_MEAN, base=MeanSlot(RationalMean(tuple(p), tuple(q)), unit))
        return FitTemplate(f"general_n{n}", formula, tuple(p_names + q_names), min(2 * n, MAX_TARGET_ORDER))
    raise UnsupportedFit(f"kind must be 'symmetric' or 'general', got {kind!r}")


def symbolic_error_coefficients(tpl: FitTemplate, order: Optional[int] = None) -> list:
    """Coefficients c_1..c_order of the error b-series as polynomials in the unknowns."""
    order = order or tpl.target_order
    err = error_series(tpl.formula, order)
    if not err.a.is_zero():
        raise UnsupportedFit(f"{tpl.name}: log-order residual; only power-rate shapes can be fitted")
    for k in (-1, 0):
        if err.b.coefficient(k) != 0:
            logger.warning("%s: t^%d coefficient does not cancel: %s", tpl.name, k, err.b.coefficient(k))
    return [as_poly(err.b.coefficient(k)) for k in range(1, order + 1)]


# ---------------------- SOLVING ----------------------
@dataclass(frozen=True)
class SolveStep:
    index: int
    equation: str
    unknown: Optional[str] = None
    solution: Optional[str] = None
    note: str = ""


@dataclass(frozen=True)
class FitBranch:
    values: dict
    achieved_order: Optional[int]
    leading_coefficient: object
    solve_log: tuple
    free_unknowns: tuple = ()


@dataclass(frozen=True)
class FitResult:
    template_name: str
    target_order: int
    branches: tuple


@dataclass
class _Branch:
    substitution: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    order: Optional[int] = None
    leading: object = None

    def extend(self, unknown: str, root: SymbolicPoly, step: SolveStep) -> "_Branch":
        substitution = {v: e.substitute({unknown: root}) for v, e in self.substitution.items()}
        substitution[unknown] = root
        return _Branch(substitution, self.log + [step])

    def key(self):
        return tuple(sorted((v, e) for v, e in self.substitution.items()))


def _solve(c: SymbolicPoly, free: list, declared: tuple, index: int):
    """Pick an unknown of lowest degree in ``c`` and return its root expressions."""
    candidates = sorted((c.degree_in(u), declared.index(u), u) for u in free)
    for degree, _, unknown in candidates:
        if degree > 2:
            continue
        parts = c.coefficients_in(unknown)
        lead = parts[degree]
        if not lead.is_constant():
            continue
        lead_value = lead.constant_value()
        if degree == 1:
            return unknown, [-parts.get(0, SymbolicPoly()) / lead_value]
        b = parts.get(1, SymbolicPoly())
        c0 = parts.get(0, SymbolicPoly())
        disc = b * b - 4 * lead_value * c0
        if not disc.is_constant():
            continue
        try:
            root = square_root(disc.constant_value())
        except ExactArithmeticError as exc:
            raise UnsupportedFit(
                f"coefficient of t^{index}: discriminant {disc} has no root in a quadratic field", index
            ) from exc
        two_a = 2 * lead_value
        return unknown, [(-b - root) / two_a, (-b + root) / two_a]
    raise UnsupportedFit(
        f"coefficient of t^{index} is not solvable for any free unknown by a linear or quadratic step: {c}",
        index,
    )


def fit(tpl: FitTemplate) -> FitResult:
    """Sequentially eliminate unknowns so the error series vanishes to the highest order."""
    coefficients = symbolic_error_coefficients(tpl)
    branches = [_Branch()]
    for index, coefficient in enumerate(coefficients, start=1):
        advanced = []
        for branch in branches:
            if branch.order is not None:
                advanced.append(branch)
                continue
            c = coefficient.substitute(branch.substitution)
            if c.is_zero():
                logger.info("%s: coefficient of t^%d vanishes identically", tpl.name, index)
                branch.log.append(SolveStep(index, "0 = 0", note="vanishes identically"))
                advanced.append(branch)
                continue
            stray = c.variables() - set(tpl.unknowns)
            if stray:
                raise UnsupportedFit(f"{tpl.name}: undeclared unknowns {sorted(stray)}", index)
            free = [u for u in tpl.unknowns if u not in branch.substitution and c.degree_in(u) > 0]
            if not free:
                branch.order = index
                branch.leading = simplify(c.constant_value())
                logger.info("%s: residual starts at t^%d with %s", tpl.name, index, format_exact(branch.leading))
                advanced.append(branch)
                continue
            unknown, roots = _solve(c, free, tpl.unknowns, index)
            for root in roots:
                step = SolveStep(index, f"{c} = 0", unknown, str(root))
                logger.info("%s: t^%d: %s = %s", tpl.name, index, unknown, root)
                advanced.append(branch.extend(unknown, as_poly(root), step))
        seen = set()
        branches = []
        for branch in advanced:
            key = branch.key()
            if key not in seen:
                seen.add(key)
                branches.append(branch)
    return FitResult(tpl.name, tpl.target_order, tuple(_finish(tpl, b) for b in branches))


def _finish(tpl: FitTemplate, branch: _Branch) -> FitBranch:
    values = {}
    for u in tpl.unknowns:
        if u in branch.substitution:
            e = branch.substitution[u]
            values[u] = simplify(e.constant_value()) if e.is_constant() else e
    free = tuple(u for u in tpl.unknowns if u not in branch.substitution)
    return FitBranch(values, branch.order, branch.leading, tuple(branch.log), free)


def instantiate(tpl: FitTemplate, values: dict) -> Formula:
    """The template formula with every unknown replaced by its value."""

    def assign(c):
        return c.evaluate(values) if isinstance(c, SymbolicPoly) else c

    return tpl.formula.map_coefficients(assign)


@dataclass(frozen=True)
class BranchCheck:
    ok: bool
    achieved_order: Optional[int]
    leading_coefficient: object
    rate_class: RateClass


def verify_branch(tpl: FitTemplate, branch: FitBranch) -> BranchCheck:
    """Substitute a branch, recompute the error series and compare exactly."""
    unresolved = [u for u in tpl.unknowns if u not in branch.values or isinstance(branch.values[u], SymbolicPoly)]
    if unresolved:
        raise UnsupportedFit(f"branch leaves {', '.join(unresolved)} without a value")
    formula = instantiate(tpl, branch.values)
    order = max(tpl.target_order, branch.achieved_order or 0)
    summary = summarize_error(error_series(formula, order))
    if branch.achieved_order is None:
        ok = summary.rate_class is RateClass.VANISHES
    else:
        ok = (
            summary.rate_class is RateClass.POWER
            and summary.power == branch.achieved_order
            and summary.coefficient == branch.leading_coefficient
        )
    return BranchCheck(ok, summary.power, summary.coefficient, summary.rate_class)
