from fractions import Fraction as F

from django.test import SimpleTestCase

from asymptotics.exact import QuadExt
from asymptotics.exceptions import UnsupportedFit
from asymptotics.fit import (
    FitTemplate,
    SymbolicPoly,
    family_template,
    fit,
    instantiate,
    symbolic_error_coefficients,
    verify_branch,
)
from asymptotics.formulas import Formula, MeanSlot, Shape, error_series, summarize_error
from asymptotics.means import Arithmetic, Geometric
from asymptotics.presets import EXAMPLE6_BRANCHES
from asymptotics.serializers import load_template

p, q = SymbolicPoly.variable("p"), SymbolicPoly.variable("q")


class SymbolicPolyTests(SimpleTestCase):
    def test_arithmetic_and_substitution(self):
        poly = (p + q) * (p - q)
        self.assertEqual(poly, p ** 2 - q ** 2)
        self.assertEqual(poly.substitute({"q": 2 * p}), -3 * p ** 2)
        self.assertEqual(poly.evaluate({"p": 3, "q": 1}), 8)

    def test_degree_split(self):
        poly = 3 * p ** 2 * q + p - 5
        self.assertEqual(poly.degree_in("p"), 2)
        parts = poly.coefficients_in("p")
        self.assertEqual(parts[2], 3 * q)
        self.assertEqual(parts[0], SymbolicPoly.constant(-5))

    def test_surd_coefficients(self):
        root3 = QuadExt(0, 1, 3)
        self.assertEqual((p * root3) ** 2, 3 * p ** 2)

    def test_missing_values(self):
        with self.assertRaises(UnsupportedFit):
            (p + q).evaluate({"p": 1})

    def test_division_by_unknown(self):
        with self.assertRaises(UnsupportedFit):
            p / q


class TemplateTests(SimpleTestCase):
    def test_first_coefficient(self):
        """S^{3,2}(p, q) against A leaves c₁ = q − 2p − 1/24."""
        coefficients = symbolic_error_coefficients(load_template("example3"))
        self.assertEqual(coefficients[0], q - 2 * p - F(1, 24))

    def test_limits(self):
        formula = Formula("burnside", Shape.SYMMETRIC_PAIR, base=MeanSlot(Arithmetic(), (0, 1)), subtrahend=MeanSlot(Arithmetic(), (0, 1)))
        with self.assertRaises(UnsupportedFit):
            FitTemplate("many", formula, tuple(f"u{k}" for k in range(7)), 3)
        with self.assertRaises(UnsupportedFit):
            FitTemplate("deep", formula, (), 14)
        with self.assertRaises(UnsupportedFit):
            FitTemplate("dup", formula, ("p", "p"), 3)

    def test_family_arguments(self):
        with self.assertRaises(UnsupportedFit):
            family_template("symmetric", "M", 1)
        with self.assertRaises(UnsupportedFit):
            family_template("symmetric", "K", 3)
        with self.assertRaises(UnsupportedFit):
            family_template("general", "N", 2)
        with self.assertRaises(UnsupportedFit):
            family_template("elliptic", "M", 2)

    def test_log_order_shapes_cannot_be_fitted(self):
        formula = Formula(
            "t3", Shape.MIDPOINT_KERNEL,
            base=MeanSlot(Arithmetic(), (0, 1)),
            exponent=MeanSlot(Geometric(), (0, 1)),
        )
        with self.assertRaises(UnsupportedFit):
            fit(FitTemplate("t3", formula, (), 3))


class FitTests(SimpleTestCase):
    def test_example3(self):
        result = fit(load_template("example3"))
        self.assertEqual(len(result.branches), 1)
        branch = result.branches[0]
        self.assertEqual(branch.values, {"p": F(23, 160), "q": F(79, 240)})
        self.assertEqual(branch.achieved_order, 5)
        self.assertEqual(branch.leading_coefficient, F(-18029, 29030400))
        self.assertEqual(branch.solve_log[0].unknown, "p")

    def test_example4(self):
        branch = fit(load_template("example4")).branches[0]
        self.assertEqual(branch.values, {"q": F(37, 120), "p": F(7, 40)})
        self.assertEqual(branch.achieved_order, 5)
        self.assertEqual(branch.leading_coefficient, F(-1517, 2419200))

    def test_example5(self):
        result = fit(load_template("example5"))
        self.assertEqual(len(result.branches), 1)
        branch = result.branches[0]
        self.assertEqual(branch.values, {"r": F(111, 392), "p": F(3281, 20160), "q": F(7303, 35280)})
        self.assertEqual(branch.achieved_order, 7)
        self.assertEqual(branch.leading_coefficient, F(10981, 31610880))
        self.assertEqual(branch.solve_log[0].unknown, "r")

    def test_example6_has_two_conjugate_branches(self):
        tpl = load_template("example6")
        result = fit(tpl)
        self.assertEqual(len(result.branches), 2)
        found = {tuple(b.values[u] for u in ("p", "q", "r")) for b in result.branches}
        self.assertEqual(found, set(EXAMPLE6_BRANCHES))
        leadings = {b.leading_coefficient for b in result.branches}
        self.assertEqual(leadings, {QuadExt(0, F(-1481, 2332800), 3), QuadExt(0, F(1481, 2332800), 3)})
        for branch in result.branches:
            self.assertEqual(branch.achieved_order, 4)
            self.assertTrue(verify_branch(tpl, branch).ok)

    def test_verify_branch(self):
        tpl = load_template("example3")
        check = verify_branch(tpl, fit(tpl).branches[0])
        self.assertTrue(check.ok)
        self.assertEqual(check.achieved_order, 5)

    def test_perturbed_branch_fails_verification(self):
        tpl = load_template("example3")
        branch = fit(tpl).branches[0]
        perturbed = type(branch)(
            {"p": F(23, 160), "q": F(79, 240) + F(1, 1000)},
            branch.achieved_order,
            branch.leading_coefficient,
            (),
        )
        check = verify_branch(tpl, perturbed)
        self.assertFalse(check.ok)
        self.assertEqual(check.achieved_order, 1)
        self.assertEqual(check.leading_coefficient, F(1, 1000))

    def test_example5_solution_chain(self):
        """The later unknowns follow from q through the triangular elimination."""
        values = fit(load_template("example5")).branches[0].values
        p_, q_, r_ = values["p"], values["q"], values["r"]
        self.assertEqual(p_, F(21, 40) - F(7, 4) * q_)
        self.assertEqual(r_, 2 * p_ + q_ / 2 - F(7, 48))

    def test_instantiate_matches_preset_rate(self):
        tpl = load_template("example4")
        formula = instantiate(tpl, {"p": F(7, 40), "q": F(37, 120)})
        summary = summarize_error(error_series(formula, 6))
        self.assertEqual(summary.power, 5)

    def test_no_unknowns(self):
        result = fit(load_template("no_unknowns"))
        branch = result.branches[0]
        self.assertEqual(branch.values, {})
        self.assertEqual(branch.achieved_order, 1)
        self.assertEqual(branch.leading_coefficient, F(-1, 24))

    def test_lowest_symmetric_family(self):
        """S^{2,1} in the M slot: p₀ = 5/24 reaches t³ with 19/5760."""
        branch = fit(family_template("symmetric", "M", 2)).branches[0]
        self.assertEqual(branch.values, {"p0": F(5, 24)})
        self.assertEqual(branch.achieved_order, 3)
        self.assertEqual(branch.leading_coefficient, F(19, 5760))

    def test_incomplete_branch_cannot_be_verified(self):
        tpl = load_template("example3")
        branch = fit(tpl).branches[0]
        partial = type(branch)({"p": F(23, 160)}, branch.achieved_order, branch.leading_coefficient, ())
        with self.assertRaises(UnsupportedFit):
            verify_branch(tpl, partial)
