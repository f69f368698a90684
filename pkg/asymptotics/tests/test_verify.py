import warnings
from fractions import Fraction as F

import mpmath
from django.test import SimpleTestCase

from asymptotics.exceptions import DomainError, FormulaError, PrecisionWarning
from asymptotics.formulas import RateClass, error_series, summarize_error
from asymptotics.presets import PRESETS, get_preset
from asymptotics.verify import (
    BOUNDS,
    PROBE_TARGETS,
    ProbeSpec,
    _residual_at,
    complete_monotonicity_probe,
    constants_table,
    derivative_probe,
    domain_grid,
    get_bound,
    guo_qi_sweep,
    inequality_sweep,
    integer_grid,
    log_grid,
    measure_rate,
    monotonicity_crosscheck,
    neville_at_zero,
    probe_grid,
    recurrence_difference_probe,
    residual,
    residual_derivatives,
    u_series_signs,
    wilker_probe,
)

PREC = 200


class GridTests(SimpleTestCase):
    def test_log_grid_endpoints(self):
        grid = log_grid(1, 100, 3)
        self.assertEqual(len(grid), 3)
        self.assertAlmostEqual(float(grid[1]), 10.0)

    def test_domain_grid_handles_negative_start(self):
        grid = domain_grid(-0.4, 10, 5)
        self.assertAlmostEqual(float(grid[0]), -0.4)
        self.assertAlmostEqual(float(grid[-1]), 10.0)
        self.assertTrue(all(a < b for a, b in zip(grid, grid[1:])))

    def test_integer_grid(self):
        self.assertEqual(integer_grid(1, 3), [1, 2, 3])


class RateTests(SimpleTestCase):
    def test_neville_recovers_polynomial(self):
        h = [mpmath.mpf(1), mpmath.mpf("0.5"), mpmath.mpf("0.25")]
        values = [2 + 3 * x + x ** 2 for x in h]
        self.assertEqual(neville_at_zero(h, values), 2)

    def test_seventh_order_rate(self):
        report = measure_rate(get_preset("example5"), 7, [100, 1000, 10000], precision=PREC)
        self.assertEqual(report.target, F(10981, 31610880))
        self.assertLess(report.relative_deviation, mpmath.mpf("1e-2"))
        self.assertLess(abs(report.extrapolated - report.target_value) / report.target_value, mpmath.mpf("1e-6"))
        self.assertFalse(report.precision_warning)

    def test_quadratic_rate_with_surd_target(self):
        report = measure_rate(get_preset("mortici_omega"), 2, [100, 1000, 10000], precision=PREC)
        self.assertIsNotNone(report.target)
        self.assertLess(report.relative_deviation, mpmath.mpf("1e-2"))

    def test_every_preset_approaches_its_leading_coefficient(self):
        """x^k times the residual is within 5% of the exact coefficient at 10³ and 0.5% at 10⁴."""
        for name, formula in PRESETS.items():
            with self.subTest(name=name):
                summary = summarize_error(error_series(formula, 10))
                self.assertIs(summary.rate_class, RateClass.POWER)
                report = measure_rate(formula, summary.power, [1000, 10000], precision=PREC)
                deviations = [abs(s - report.target_value) / abs(report.target_value) for s in report.scaled]
                self.assertLess(deviations[0], mpmath.mpf("0.05"))
                self.assertLess(deviations[1], mpmath.mpf("0.005"))
                self.assertLess(deviations[1], deviations[0])

    def test_gosper_beats_burnside(self):
        with mpmath.workprec(PREC):
            gosper = abs(residual(get_preset("gosper"), 20, PREC))
            burnside = abs(residual(get_preset("burnside"), 20, PREC))
        self.assertLess(gosper, burnside)

    def test_points_must_increase(self):
        with self.assertRaises(DomainError):
            measure_rate(get_preset("gosper"), 2, [100, 10])

    def test_precision_floor_is_flagged(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = measure_rate(get_preset("example5"), 7, [10 ** 12], precision=64)
        self.assertTrue(report.precision_warning)
        self.assertTrue(any(issubclass(w.category, PrecisionWarning) for w in caught))


class SharpConstantTests(SimpleTestCase):
    def test_registered_constants_match(self):
        for name in ("example1", "example2", "example3", "example4", "example5", "example6_m1", "example6_m2"):
            with self.subTest(name=name):
                for constant in constants_table(name, PREC):
                    self.assertTrue(constant.matches, f"{name} at {constant.point}: {mpmath.nstr(constant.ratio, 12)}")

    def test_limit_at_infinity_is_sqrt_2pi(self):
        row = constants_table("example4", PREC)[-1]
        self.assertEqual(row.point, "inf")
        with mpmath.workprec(PREC):
            self.assertEqual(row.ratio, mpmath.sqrt(2 * mpmath.pi))

    def test_zero_limit_is_read_off_directly(self):
        """The 0+ constant is the residual at 2^(−precision/2) itself."""
        f = get_preset("example6_m2")
        with mpmath.workprec(PREC):
            direct = residual(f, mpmath.ldexp(1, -(PREC // 2)), PREC)
        self.assertEqual(_residual_at(f, "0+", PREC), direct)

    def test_unknown_preset(self):
        with self.assertRaises(FormulaError):
            constants_table("stirling")


class InequalityTests(SimpleTestCase):
    def test_ramanujan(self):
        report = inequality_sweep(get_bound("ramanujan"), log_grid(1, 100, 12), PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.failures, 0)
        self.assertGreater(report.min_margin, 0)

    def test_integer_bound_attained_at_one(self):
        report = inequality_sweep(BOUNDS["example3_int"], integer_grid(1, 10), PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.rows[0].status, "attained")
        self.assertTrue(all(r.status == "ok" for r in report.rows[1:]))

    def test_truncated_decimal_constant(self):
        report = inequality_sweep(BOUNDS["mortici_omega"], [0, mpmath.mpf("0.5"), 1, 10, 50], PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.rows[0].status, "attained")

    def test_real_line_bound(self):
        report = inequality_sweep(BOUNDS["example4_real"], log_grid(mpmath.mpf("1e-3"), 50, 10), PREC)
        self.assertTrue(report.passed)

    def test_every_registered_bound(self):
        for name, spec in BOUNDS.items():
            with self.subTest(name=name):
                if spec.domain == "integer":
                    grid = integer_grid(1, 12)
                else:
                    grid = domain_grid(spec.default_from, spec.default_to, 8)
                report = inequality_sweep(spec, grid, PREC)
                self.assertTrue(report.passed, f"{name}: {report.failures} failures")

    def test_batir_down_to_zero(self):
        report = inequality_sweep(BOUNDS["batir2"], log_grid(mpmath.mpf("1e-3"), 50, 12), PREC)
        self.assertTrue(report.passed)
        self.assertTrue(all(r.status == "ok" for r in report.rows))

    def test_fourth_order_mean_integer_bound(self):
        report = inequality_sweep(BOUNDS["example5_int"], integer_grid(1, 20), PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.rows[0].status, "attained")
        self.assertGreater(report.min_margin, 0)

    def test_decimal_constant_attained_from_below(self):
        """β is loosened downward, so the ς-inequality still holds with equality at 0."""
        report = inequality_sweep(BOUNDS["mortici_sigma"], [0, 1, 10], PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.rows[0].status, "attained")

    def test_guo_qi(self):
        report = guo_qi_sweep(1, log_grid(mpmath.mpf("0.1"), 1000, 15), PREC)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.rows), 15)

    def test_guo_qi_orders(self):
        grid = log_grid(mpmath.mpf("0.1"), 1000, 10)
        for k in range(1, 6):
            with self.subTest(k=k):
                self.assertTrue(guo_qi_sweep(k, grid, PREC).passed)

    def test_unknown_bound(self):
        with self.assertRaises(FormulaError):
            get_bound("wallis")


class DerivativeTests(SimpleTestCase):
    def test_closed_forms_match_finite_differences(self):
        x = mpmath.mpf("1.7")
        for name in ("f1", "f2", "f3", "f4", "f5", "f6"):
            with self.subTest(name=name), mpmath.workprec(PREC):
                f = get_preset(PROBE_TARGETS[name].preset)
                d1, d2 = residual_derivatives(name, x, PREC)
                h1, h2 = mpmath.mpf("1e-12"), mpmath.mpf("1e-10")
                fd1 = (residual(f, x + h1, PREC) - residual(f, x - h1, PREC)) / (2 * h1)
                fd2 = (residual(f, x + h2, PREC) - 2 * residual(f, x, PREC) + residual(f, x - h2, PREC)) / h2 ** 2
                self.assertLess(abs(d1 - fd1), mpmath.mpf("1e-15"))
                self.assertLess(abs(d2 - fd2), mpmath.mpf("1e-15"))

    def test_f4_second_derivative_sign(self):
        """f4'' is measured negative; the stated positive sign is reported."""
        target = PROBE_TARGETS["f4"]
        report = derivative_probe(ProbeSpec("f4", 2, tuple(probe_grid(target, n=8))), PREC)
        self.assertEqual(report.verdict, "consistent")
        self.assertEqual(report.expected_sign, -1)
        self.assertIn("differs from the stated +1", report.note)

    def test_f5_signs(self):
        grid = tuple(probe_grid(PROBE_TARGETS["f5"], n=8))
        self.assertTrue(derivative_probe(ProbeSpec("f5", 1, grid), PREC).passed)
        self.assertTrue(derivative_probe(ProbeSpec("f5", 2, grid), PREC).passed)

    def test_rational_mean_residual_signs(self):
        """f6 rises and is concave, f7 falls and is convex, as stated."""
        for name in ("f6", "f7"):
            target = PROBE_TARGETS[name]
            grid = tuple(probe_grid(target, n=6))
            for order in (1, 2):
                with self.subTest(name=name, order=order):
                    report = derivative_probe(ProbeSpec(name, order, grid), PREC)
                    self.assertEqual(report.verdict, "consistent")
                    self.assertEqual(report.expected_sign, target.signs[order])
                    self.assertEqual(report.note, "")
        self.assertEqual((PROBE_TARGETS["f6"].signs, PROBE_TARGETS["f7"].signs), ({1: 1, 2: -1}, {1: -1, 2: 1}))

    def test_rational_mean_recurrence_differences(self):
        for name, sign in (("f6", 1), ("f7", -1)):
            with self.subTest(name=name):
                report = recurrence_difference_probe(name, probe_grid(PROBE_TARGETS[name], n=6), PREC)
                self.assertEqual(report.verdict, "consistent")
                self.assertEqual(report.expected_sign, sign)

    def test_complete_monotonicity(self):
        grid = log_grid(mpmath.mpf("0.1"), 100, 6)
        report = complete_monotonicity_probe("f2", 3, grid, PREC)
        self.assertTrue(report.passed)
        self.assertEqual(report.verdict, "consistent with complete monotonicity through order 3")
        self.assertEqual([r.order for r in report.reports], [0, 1, 2, 3])

    def test_not_completely_monotone(self):
        with self.assertRaises(FormulaError):
            complete_monotonicity_probe("f3")

    def test_recurrence_difference(self):
        grid = probe_grid(PROBE_TARGETS["f5"], n=6)
        report = recurrence_difference_probe("f5", grid, PREC)
        self.assertEqual(report.verdict, "consistent")
        self.assertEqual(report.kind, "recurrence")

    def test_crosscheck(self):
        report = monotonicity_crosscheck("f1", log_grid(mpmath.mpf("0.1"), 100, 8), PREC)
        self.assertEqual(report.verdict, "consistent")

    def test_custom_formula_needs_expected_sign(self):
        with self.assertRaises(FormulaError):
            derivative_probe(ProbeSpec(get_preset("gosper"), 1, (1, 2)))

    def test_custom_formula_by_stencil(self):
        """Gosper's residual decreases toward zero."""
        report = derivative_probe(ProbeSpec(get_preset("gosper"), 1, (2, 5, 10), expected_sign=-1), PREC)
        self.assertEqual(report.verdict, "consistent")

    def test_grid_must_stay_in_domain(self):
        with self.assertRaises(DomainError):
            probe_grid(PROBE_TARGETS["f3"], lo=-1)


class AuxiliarySignTests(SimpleTestCase):
    def test_u_series(self):
        rows = u_series_signs(3, 10)
        self.assertEqual(rows[0], (3, F(11, 30), True))
        self.assertTrue(all(positive for _, _, positive in rows))

    def test_wilker(self):
        report = wilker_probe(log_grid(mpmath.mpf("1e-3"), 20, 10), PREC)
        self.assertEqual(report.verdict, "consistent")
