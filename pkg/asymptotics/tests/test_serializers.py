import json
import tempfile
from fractions import Fraction as F
from pathlib import Path

import mpmath
from django.test import SimpleTestCase
from rest_framework import serializers

from asymptotics.exact import QuadExt
from asymptotics.fit import SymbolicPoly, fit
from asymptotics.means import SymmetricRationalMean
from asymptotics.presets import get_preset
from asymptotics.serializers import (
    BigFloatField,
    ExactField,
    FitResultSerializer,
    FitTemplateSerializer,
    FormulaSerializer,
    MeanExprSerializer,
    bundled_templates,
    formula_to_json,
    load_formula_file,
    load_template,
)


class MeanDocumentTests(SimpleTestCase):
    def test_null_entry_is_filled(self):
        serializer = MeanExprSerializer(data={"kind": "symmetric_rational", "n": 3, "p": ["23/160", None], "q": ["79/240", None]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        mean = serializer.save()
        self.assertIsInstance(mean, SymmetricRationalMean)
        self.assertEqual(mean.halves(), ((F(23, 160), F(57, 160)), (F(79, 240), F(41, 240))))

    def test_bad_sum_is_rejected(self):
        serializer = MeanExprSerializer(data={"kind": "rational", "p": ["1", "1", "0"], "q": ["1", "0"]})
        self.assertFalse(serializer.is_valid())

    def test_two_nulls_are_rejected(self):
        serializer = MeanExprSerializer(data={"kind": "rational", "p": [None, None, "1"], "q": ["1", "0"]})
        self.assertFalse(serializer.is_valid())

    def test_power_product(self):
        doc = {"kind": "power_product", "factors": [{"kind": "arithmetic"}, {"kind": "geometric"}], "weights": ["2/3", "1/3"]}
        serializer = MeanExprSerializer(data=doc)
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_unknown_kind(self):
        self.assertFalse(MeanExprSerializer(data={"kind": "heronian"}).is_valid())


class TemplateDocumentTests(SimpleTestCase):
    def test_bundled_template(self):
        tpl = load_template("example3")
        self.assertEqual(tpl.unknowns, ("p", "q"))
        self.assertEqual(tpl.target_order, 5)
        self.assertEqual(tpl.formula.base.mean.p[0], SymbolicPoly.variable("p"))

    def test_bundled_names(self):
        self.assertEqual(bundled_templates(), ["example3", "example4", "example5", "example6", "no_unknowns"])

    def test_undeclared_unknown(self):
        doc = {
            "name": "typo",
            "unknowns": ["p"],
            "target_order": 3,
            "formula": {
                "name": "typo",
                "shape": "shifted_mean",
                "base": {"mean": {"kind": "rational", "p": ["p", None, "s"], "q": ["1/2", None]}, "shifts": ["0", "1"]},
            },
        }
        serializer = FitTemplateSerializer(data=doc)
        self.assertFalse(serializer.is_valid())

    def test_target_order_limit(self):
        doc = json.loads((Path(__file__).resolve().parent.parent / "data" / "templates" / "example3.json").read_text())
        doc["target_order"] = 14
        self.assertFalse(FitTemplateSerializer(data=doc).is_valid())

    def test_missing_template(self):
        with self.assertRaises(serializers.ValidationError):
            load_template("example9")


class FormulaDocumentTests(SimpleTestCase):
    def test_presets_survive_a_round_trip(self):
        for name in ("gosper", "batir2", "mortici_omega", "example1", "example5", "example6_m1"):
            with self.subTest(name=name):
                f = get_preset(name)
                serializer = FormulaSerializer(data=formula_to_json(f))
                self.assertTrue(serializer.is_valid(), serializer.errors)
                self.assertEqual(serializer.save(), f)

    def test_shape_violation_is_a_validation_error(self):
        doc = formula_to_json(get_preset("burnside"))
        doc["base"]["shifts"] = ["0", "2"]
        serializer = FormulaSerializer(data=doc)
        self.assertFalse(serializer.is_valid())

    def test_preset_reference_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "f.json"
            path.write_text(json.dumps({"preset": "gosper"}), encoding="utf-8")
            self.assertEqual(load_formula_file(path), get_preset("gosper"))
            path.write_text("{not json", encoding="utf-8")
            with self.assertRaises(serializers.ValidationError):
                load_formula_file(path)


class OutputTests(SimpleTestCase):
    def test_fit_values(self):
        data = FitResultSerializer(fit(load_template("example3"))).data
        branch = data["branches"][0]
        self.assertEqual(branch["values"], {"p": "23/160", "q": "79/240"})
        self.assertEqual(branch["achieved_order"], 5)
        self.assertEqual(branch["leading_coefficient"], "-18029/29030400")

    def test_surd_output(self):
        value = ExactField().to_representation(QuadExt(0, F(-1481, 2332800), 3))
        self.assertEqual(value, {"a": "0", "b": "-1481/2332800", "d": 3})

    def test_big_float(self):
        self.assertEqual(BigFloatField().to_representation(mpmath.mpf("0.5")), "0.5")
