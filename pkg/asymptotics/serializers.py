import json
import re
from fractions import Fraction
from pathlib import Path

import mpmath
from rest_framework import serializers

from .exact import exact_from_json, exact_to_json
from .exceptions import GammaAsymError
from .fit import FitTemplate, SymbolicPoly
from .formulas import Formula, LogRational, MeanSlot, RationalFn, RationalFunction, Shape
from .means import (
    Arithmetic,
    Geometric,
    Identric,
    Logarithmic,
    PowerProduct,
    RationalMean,
    SymmetricRationalMean,
    symmetric_rational,
)
from .presets import get_preset

TEMPLATE_DIR = Path(__file__).resolve().parent / "data" / "templates"
IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

MEAN_KINDS = ["arithmetic", "geometric", "identric", "logarithmic", "power_product", "rational", "symmetric_rational"]
SIMPLE_MEANS = {"arithmetic": Arithmetic, "geometric": Geometric, "identric": Identric, "logarithmic": Logarithmic}


# ---------------------- FIELDS ----------------------
class ExactField(serializers.Field):
    """Rationals as "num/den" strings, surds as {"a", "b", "d"}."""

    def to_representation(self, value):
        if isinstance(value, SymbolicPoly):
            return str(value)
        return exact_to_json(value)

    def to_internal_value(self, data):
        try:
            return exact_from_json(data)
        except (ValueError, ZeroDivisionError, TypeError, GammaAsymError) as exc:
            raise serializers.ValidationError(f"not an exact value: {exc}")


class CoefficientField(ExactField):
    """An exact value or the name of a declared unknown (``context["unknowns"]``)."""

    def to_internal_value(self, data):
        if isinstance(data, str) and IDENTIFIER.match(data):
            if data not in self.context.get("unknowns", ()):
                raise serializers.ValidationError(f"{data!r} is not a declared unknown")
            return SymbolicPoly.variable(data)
        return super().to_internal_value(data)


class BigFloatField(serializers.Field):
    """mpf values printed with ``context["digits"]`` significant digits."""

    def to_representation(self, value):
        digits = self.context.get("digits", 20)
        return mpmath.nstr(mpmath.mpf(value), digits)


def _library_call(fn, *args):
    try:
        return fn(*args)
    except GammaAsymError as exc:
        raise serializers.ValidationError(str(exc))


def _fill(values, total):
    """Replace a single null entry by ``total`` minus the others."""
    values = list(values)
    missing = [i for i, v in enumerate(values) if v is None]
    if len(missing) > 1:
        raise serializers.ValidationError("at most one coefficient per vector may be null")
    if missing:
        known = sum((v for v in values if v is not None), SymbolicPoly())
        rest = total - known
        values[missing[0]] = rest.constant_value() if rest.is_constant() else rest
    return values


# ---------------------- INPUT ----------------------
class MeanExprSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=MEAN_KINDS)
    n = serializers.IntegerField(required=False, min_value=1)
    p = serializers.ListField(child=CoefficientField(allow_null=True), required=False)
    q = serializers.ListField(child=CoefficientField(allow_null=True), required=False)
    factors = serializers.ListField(child=serializers.DictField(), required=False)
    weights = serializers.ListField(child=CoefficientField(), required=False)

    def validate(self, attrs):
        kind = attrs["kind"]
        if kind in SIMPLE_MEANS:
            attrs["instance"] = SIMPLE_MEANS[kind]()
            return attrs
        if kind == "power_product":
            factors = attrs.get("factors") or []
            weights = attrs.get("weights") or []
            if not factors or len(factors) != len(weights):
                raise serializers.ValidationError("power_product needs matching factors and weights")
            means = []
            for doc in factors:
                child = MeanExprSerializer(data=doc, context=self.context)
                child.is_valid(raise_exception=True)
                means.append(child.validated_data["instance"])
            attrs["instance"] = _library_call(PowerProduct, tuple(zip(means, weights)))
            return attrs
        if "p" not in attrs or "q" not in attrs:
            raise serializers.ValidationError(f"{kind} means need p and q")
        if kind == "symmetric_rational":
            if "n" not in attrs:
                raise serializers.ValidationError("symmetric_rational needs n")
            half = Fraction(1, 2)
            attrs["instance"] = _library_call(
                symmetric_rational, attrs["n"], _fill(attrs["p"], half), _fill(attrs["q"], half)
            )
            return attrs
        attrs["instance"] = _library_call(
            RationalMean, tuple(_fill(attrs["p"], 1)), tuple(_fill(attrs["q"], 1))
        )
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class RTermSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["log_rational", "rational"])
    c = CoefficientField(required=False)
    num = serializers.ListField(child=CoefficientField(), allow_empty=False)
    den = serializers.ListField(child=CoefficientField(), required=False)

    def validate(self, attrs):
        den = tuple(attrs.get("den") or (Fraction(1),))
        P = _library_call(RationalFunction, tuple(attrs["num"]), den)
        if attrs["kind"] == "log_rational":
            if "c" not in attrs:
                raise serializers.ValidationError("log_rational terms need c")
            attrs["instance"] = _library_call(LogRational, attrs["c"], P)
        else:
            attrs["instance"] = _library_call(RationalFn, P)
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class MeanSlotSerializer(serializers.Serializer):
    mean = MeanExprSerializer()
    shifts = serializers.ListField(child=CoefficientField(), min_length=2, max_length=2)

    def validate(self, attrs):
        attrs["instance"] = _library_call(MeanSlot, attrs["mean"]["instance"], tuple(attrs["shifts"]))
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class FormulaSerializer(serializers.Serializer):
    name = serializers.CharField(max_length=100)
    shape = serializers.ChoiceField(choices=[s.value for s in Shape])
    base = MeanSlotSerializer()
    subtrahend = MeanSlotSerializer(required=False, allow_null=True)
    exponent = MeanSlotSerializer(required=False)
    corrections = RTermSerializer(many=True, required=False)
    description = serializers.CharField(required=False, allow_blank=True, default="")
    reference = serializers.CharField(required=False, allow_blank=True, default="")

    def validate(self, attrs):
        kwargs = {
            "name": attrs["name"],
            "shape": Shape(attrs["shape"]),
            "base": attrs["base"]["instance"],
            "subtrahend": attrs["subtrahend"]["instance"] if attrs.get("subtrahend") else None,
            "corrections": tuple(term["instance"] for term in attrs.get("corrections") or ()),
            "description": attrs.get("description", ""),
            "reference": attrs.get("reference", ""),
        }
        if attrs.get("exponent"):
            kwargs["exponent"] = attrs["exponent"]["instance"]
        attrs["instance"] = _library_call(lambda: Formula(**kwargs))
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


class FitTemplateSerializer(serializers.Serializer):
    name = serializers.CharField(max_length=100)
    unknowns = serializers.ListField(child=serializers.RegexField(IDENTIFIER), max_length=6, required=False)
    target_order = serializers.IntegerField(min_value=1, max_value=13)
    formula = FormulaSerializer()

    def to_internal_value(self, data):
        # coefficient fields resolve names against the unknowns of this document
        if isinstance(data, dict):
            self.context["unknowns"] = tuple(data.get("unknowns") or ())
        return super().to_internal_value(data)

    def validate(self, attrs):
        attrs["instance"] = _library_call(
            FitTemplate, attrs["name"], attrs["formula"]["instance"], tuple(attrs.get("unknowns") or ()), attrs["target_order"]
        )
        return attrs

    def create(self, validated_data):
        return validated_data["instance"]


# ---------------------- OUTPUT ----------------------
class SolveStepSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    equation = serializers.CharField()
    unknown = serializers.CharField(allow_null=True)
    solution = serializers.CharField(allow_null=True)
    note = serializers.CharField(allow_blank=True)


class FitBranchSerializer(serializers.Serializer):
    values = serializers.SerializerMethodField()
    achieved_order = serializers.IntegerField(allow_null=True)
    leading_coefficient = ExactField(allow_null=True)
    solve_log = SolveStepSerializer(many=True)
    free_unknowns = serializers.ListField(child=serializers.CharField())

    def get_values(self, obj):
        field = ExactField()
        return {name: field.to_representation(value) for name, value in obj.values.items()}


class FitResultSerializer(serializers.Serializer):
    template_name = serializers.CharField()
    target_order = serializers.IntegerField()
    branches = FitBranchSerializer(many=True)


class RateReportSerializer(serializers.Serializer):
    preset = serializers.CharField()
    exponent = serializers.IntegerField()
    xs = serializers.ListField(child=BigFloatField())
    scaled = serializers.ListField(child=BigFloatField())
    extrapolated = BigFloatField()
    target = ExactField(allow_null=True)
    target_value = BigFloatField(allow_null=True)
    relative_deviation = BigFloatField(allow_null=True)
    precision_warning = serializers.BooleanField()


class BoundRowSerializer(serializers.Serializer):
    x = BigFloatField()
    lower_margin = BigFloatField()
    upper_margin = BigFloatField()
    status = serializers.CharField()


class BoundReportSerializer(serializers.Serializer):
    name = serializers.CharField()
    description = serializers.CharField()
    passed = serializers.BooleanField()
    failures = serializers.IntegerField()
    min_margin = BigFloatField()
    min_margin_at = BigFloatField(allow_null=True)
    min_margin_side = serializers.CharField(allow_blank=True)
    rows = BoundRowSerializer(many=True)


class ProbeRowSerializer(serializers.Serializer):
    x = BigFloatField()
    value = BigFloatField()
    sign = serializers.IntegerField()
    status = serializers.CharField()


class ProbeReportSerializer(serializers.Serializer):
    target = serializers.CharField()
    kind = serializers.CharField()
    order = serializers.IntegerField()
    expected_sign = serializers.IntegerField()
    verdict = serializers.CharField()
    passed = serializers.BooleanField()
    note = serializers.CharField(allow_blank=True)
    rows = ProbeRowSerializer(many=True)


class SharpConstantSerializer(serializers.Serializer):
    point = serializers.CharField()
    label = serializers.CharField(allow_blank=True)
    quantity = serializers.CharField()
    ratio = BigFloatField()
    normalized = BigFloatField()
    closed_form = serializers.CharField(allow_null=True)
    expected = BigFloatField(allow_null=True)
    printed = serializers.CharField(allow_null=True)
    matches = serializers.BooleanField(allow_null=True)


# ---------------------- DOCUMENTS ----------------------
def mean_to_json(m) -> dict:
    field = ExactField()
    doc = {"kind": m.kind}
    if isinstance(m, PowerProduct):
        doc["factors"] = [mean_to_json(f) for f, _ in m.factors]
        doc["weights"] = [field.to_representation(w) for _, w in m.factors]
    elif isinstance(m, SymmetricRationalMean):
        p_half, q_half = m.halves()
        doc["n"] = m.n
        doc["p"] = [field.to_representation(c) for c in p_half]
        doc["q"] = [field.to_representation(c) for c in q_half]
    elif isinstance(m, RationalMean):
        doc["p"] = [field.to_representation(c) for c in m.p]
        doc["q"] = [field.to_representation(c) for c in m.q]
    return doc


def slot_to_json(slot: MeanSlot) -> dict:
    field = ExactField()
    return {"mean": mean_to_json(slot.mean), "shifts": [field.to_representation(s) for s in slot.shifts]}


def formula_to_json(f: Formula) -> dict:
    field = ExactField()
    doc = {"name": f.name, "shape": f.shape.value, "base": slot_to_json(f.base)}
    if f.subtrahend is not None:
        doc["subtrahend"] = slot_to_json(f.subtrahend)
    doc["exponent"] = slot_to_json(f.exponent)
    terms = []
    for term in f.corrections:
        entry = {"kind": term.kind}
        if isinstance(term, LogRational):
            entry["c"] = field.to_representation(term.c)
        entry["num"] = [field.to_representation(c) for c in term.P.num]
        entry["den"] = [field.to_representation(c) for c in term.P.den]
        terms.append(entry)
    if terms:
        doc["corrections"] = terms
    if f.description:
        doc["description"] = f.description
    if f.reference:
        doc["reference"] = f.reference
    return doc


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise serializers.ValidationError(f"{path.name}: invalid JSON ({exc})")


def load_template(path_or_name) -> FitTemplate:
    """A template file, or the name of a bundled template."""
    path = Path(path_or_name)
    if not path.is_file():
        bundled = TEMPLATE_DIR / f"{path_or_name}.json"
        if not bundled.is_file():
            raise serializers.ValidationError(f"no template file or bundled template named {path_or_name!r}")
        path = bundled
    serializer = FitTemplateSerializer(data=_read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def bundled_templates() -> list:
    return sorted(p.stem for p in TEMPLATE_DIR.glob("*.json"))


def load_formula_file(path) -> Formula:
    """A formula document, or {"preset": name}."""
    data = _read_json(Path(path))
    if isinstance(data, dict) and set(data) == {"preset"}:
        return _library_call(get_preset, data["preset"])
    serializer = FormulaSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
