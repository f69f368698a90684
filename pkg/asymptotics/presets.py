"""
Named formulas: classical approximations of Γ(x+1) and the mean-based
examples built from them.
"""
from __future__ import annotations

from dataclasses import replace
from fractions import Fraction as F

from .exact import QuadExt
from .exceptions import FormulaError
from .formulas import Formula, LogRational, MeanSlot, RationalFn, RationalFunction, Shape
from .means import Arithmetic, Geometric, Identric, PowerProduct, h21, s21, s32, s43

_A = Arithmetic()
_UNIT = (F(0), F(1))

# ω and ς, the two roots of y² − y + 1/6
OMEGA = QuadExt(F(1, 2), F(-1, 6), 3)
SIGMA = QuadExt(F(1, 2), F(1, 6), 3)

# H^{2,1} parameters solving the order-4 system, −√3 branch first
EXAMPLE6_BRANCHES = (
    (QuadExt(F(129, 360), F(-59, 360), 3), QuadExt(F(129, 360), F(59, 360), 3), QuadExt(F(1, 2), F(-29, 180), 3)),
    (QuadExt(F(129, 360), F(59, 360), 3), QuadExt(F(129, 360), F(-59, 360), 3), QuadExt(F(1, 2), F(29, 180), 3)),
)

# provenance shown by the presets listing
REFERENCES = {
    "stirling": "Eq. S",
    "burnside": "Eq. B",
    "gosper": "Eq. G",
    "batir1": "Eq. Batir1",
    "mortici_m": "Eq. M",
    "ramanujan_upper": "Eq. R",
    "ramanujan_lower": "Eq. R",
    "batir2": "Eq. Batir2",
    "mortici_omega": "Eq. Ml",
    "mortici_sigma": "Eq. Mr",
    "example1": "A^(2/3)G^(1/3)",
    "example2": "identric",
    "example3": "Eq. E-M3,2",
    "example4": "Eq. E-N3,2",
    "example5": "Eq. N4/3",
    "example6_m1": "Eq. M1",
    "example6_m2": "Eq. M2",
}


def _stirling_like(name, corrections=(), description=""):
    return Formula(
        name=name,
        shape=Shape.SHIFTED_MEAN,
        base=MeanSlot(_A, (F(0), F(0))),
        corrections=corrections,
        description=description,
    )


def _symmetric_pair(name, m, n=_A, description=""):
    return Formula(
        name=name,
        shape=Shape.SYMMETRIC_PAIR,
        base=MeanSlot(m, _UNIT),
        subtrahend=MeanSlot(n, _UNIT),
        description=description,
    )


def _log(c, *num):
    return LogRational(F(c), RationalFunction(tuple(F(v) for v in num)))


def _ramanujan(name, c, description):
    # (8x³+4x²+x+c)^(1/6) = √2·√x·(1 + t/2 + t²/8 + c·t³/8)^(1/6)
    return _stirling_like(name, (_log(F(1, 6), 1, F(1, 2), F(1, 8), F(c) / 8),), description)


def _build():
    presets = [
        _stirling_like("stirling", description="Stirling's formula √(2πx)(x/e)^x"),
        _symmetric_pair("burnside", _A, description="Burnside's formula √(2π)((x+1/2)/e)^(x+1/2)"),
        _stirling_like(
            "gosper",
            (_log(F(1, 2), 1, F(1, 6)),),
            "Gosper's formula √(2π(x+1/6))(x/e)^x",
        ),
        _stirling_like(
            "batir1",
            (_log(F(-1, 2), 1, F(-1, 6)),),
            "Batir's formula √(2π)x^(x+1)e^(−x)/√(x−1/6)",
        ),
        _symmetric_pair(
            "mortici_m",
            PowerProduct(((s21(F(1, 6)), F(1, 2)), (_A, F(1, 2)))),
            description="Mortici's formula with the mean √(x²+x+1/6)",
        ),
        _ramanujan("ramanujan_upper", F(1, 30), "Ramanujan's upper bound √π(x/e)^x(8x³+4x²+x+1/30)^(1/6)"),
        _ramanujan("ramanujan_lower", F(1, 100), "Ramanujan's lower bound √π(x/e)^x(8x³+4x²+x+1/100)^(1/6)"),
        _stirling_like(
            "batir2",
            (
                _log(F(1, 2), 1, F(1, 2)),
                RationalFn(RationalFunction((F(0), F(-1, 6)), (F(1), F(3, 8)))),
            ),
            "Batir's formula √(2π)x^x e^(−x)√(x+1/2)·e^(−1/(6(x+3/8)))",
        ),
        Formula(
            name="mortici_omega",
            shape=Shape.SHIFTED_MEAN,
            base=MeanSlot(_A, (OMEGA, OMEGA)),
            description="Mortici's lower formula √(2πe)·e^(−ω)((x+ω)/e)^(x+1/2), ω = (3−√3)/6",
        ),
        Formula(
            name="mortici_sigma",
            shape=Shape.SHIFTED_MEAN,
            base=MeanSlot(_A, (SIGMA, SIGMA)),
            description="Mortici's upper formula √(2πe)·e^(−ς)((x+ς)/e)^(x+1/2), ς = (3+√3)/6",
        ),
        _symmetric_pair(
            "example1",
            PowerProduct(((_A, F(2, 3)), (Geometric(), F(1, 3)))),
            description="arithmetic-geometric power mean A^(2/3)G^(1/3)",
        ),
        _symmetric_pair("example2", Identric(), description="identric mean I(x, x+1)"),
        _symmetric_pair(
            "example3",
            s32(F(23, 160), F(79, 240)),
            description="(x+1/2)(x²+x+23/80)/(x²+x+79/240) as base mean",
        ),
        _symmetric_pair(
            "example4",
            _A,
            s32(F(7, 40), F(37, 120)),
            description="(x+1/2)(x²+x+7/20)/(x²+x+37/120) as subtracted mean",
        ),
        _symmetric_pair(
            "example5",
            _A,
            s43(F(3281, 20160), F(7303, 35280), F(111, 392)),
            description="S^{4,3} subtracted mean with parameters 3281/20160, 7303/35280, 111/392",
        ),
    ]
    for index, (p, q, r) in enumerate(EXAMPLE6_BRANCHES, start=1):
        presets.append(
            Formula(
                name=f"example6_m{index}",
                shape=Shape.SHIFTED_MEAN,
                base=MeanSlot(h21(p, q, r), _UNIT),
                description=f"asymmetric H^{{2,1}} mean, branch {index}",
            )
        )
    return {f.name: replace(f, reference=REFERENCES[f.name]) for f in presets}


PRESETS = _build()


def get_preset(name: str) -> Formula:
    try:
        return PRESETS[name]
    except KeyError:
        raise FormulaError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
