from fractions import Fraction as F

import mpmath
from django.test import SimpleTestCase

from asymptotics.exceptions import SeriesError
from asymptotics.series import (
    LaurentSeries,
    exp,
    format_series,
    log1p,
    pow_affine,
    reciprocal,
    series_to_json,
)
from asymptotics.special import lngamma_expansion, lngamma_num


class LaurentSeriesTests(SimpleTestCase):
    def test_product_truncates_at_lower_order(self):
        """(1 + t)² known to O(t^3) keeps 1 + 2t + t²."""
        s = LaurentSeries.from_polynomial([1, 1], order=3)
        square = s * s
        self.assertEqual(square.order, 3)
        self.assertEqual(square, LaurentSeries.from_polynomial([1, 2, 1], order=3))

    def test_reciprocal_geometric(self):
        s = LaurentSeries.from_polynomial([1, 1], order=5)
        self.assertEqual(reciprocal(s), LaurentSeries.from_polynomial([1, -1, 1, -1, 1], order=5))

    def test_reciprocal_of_monomial_shifts_valuation(self):
        """1/(t + t²) = t⁻¹ − 1 + t − …"""
        s = LaurentSeries({1: 1, 2: 1}, order=5)
        r = reciprocal(s)
        self.assertEqual(r.leading(), (-1, F(1)))
        self.assertEqual(r.coefficient(0), -1)
        self.assertEqual(r.coefficient(1), 1)

    def test_exp_inverts_log1p(self):
        t = LaurentSeries({1: 1}, order=8)
        self.assertEqual(exp(log1p(t)), LaurentSeries.from_polynomial([1, 1], order=8))

    def test_square_root_binomial(self):
        """(1 + t)^(1/2) = 1 + t/2 − t²/8 + t³/16 + O(t⁴)."""
        root = pow_affine(LaurentSeries.from_polynomial([1, 1], order=4), F(1, 2))
        self.assertEqual(root, LaurentSeries.from_polynomial([1, F(1, 2), F(-1, 8), F(1, 16)], order=4))

    def test_deep_pole_is_rejected(self):
        with self.assertRaises(SeriesError):
            LaurentSeries({-3: 1})

    def test_unknown_coefficient_raises(self):
        with self.assertRaises(SeriesError):
            LaurentSeries({0: 1}, order=3).coefficient(3)

    def test_log1p_needs_vanishing_constant(self):
        with self.assertRaises(SeriesError):
            log1p(LaurentSeries.from_polynomial([1, 1], order=4))

    def test_reciprocal_of_zero(self):
        with self.assertRaises(SeriesError):
            reciprocal(LaurentSeries.zero(4))


class FormatTests(SimpleTestCase):
    def test_format(self):
        s = LaurentSeries({1: F(1, 12), 3: F(-1, 360)}, order=5)
        self.assertEqual(format_series(s), "1/12·t - 1/360·t^3 + O(t^5)")
        self.assertEqual(format_series(LaurentSeries({2: 1}, order=3)), "t^2 + O(t^3)")
        self.assertEqual(format_series(LaurentSeries.zero(4)), "O(t^4)")

    def test_json(self):
        s = LaurentSeries({-1: -1, 1: F(1, 12)}, order=3)
        self.assertEqual(series_to_json(s), [[-1, "-1"], [1, "1/12"]])


class LnGammaExpansionTests(SimpleTestCase):
    def test_bernoulli_coefficients(self):
        expansion = lngamma_expansion(5)
        self.assertEqual(expansion.a, LaurentSeries({-1: 1, 0: F(1, 2)}, order=6))
        self.assertEqual(expansion.b.coefficient(-1), -1)
        self.assertEqual(expansion.b.coefficient(1), F(1, 12))
        self.assertEqual(expansion.b.coefficient(3), F(-1, 360))
        self.assertEqual(expansion.b.coefficient(5), F(1, 1260))

    def test_numeric_agreement(self):
        """The truncated expansion at x = 50 agrees with ln Γ(51) to the first dropped term."""
        with mpmath.workprec(200):
            approx = lngamma_expansion(11).evaluate(50, 200) + mpmath.log(2 * mpmath.pi) / 2
            self.assertLess(abs(approx - lngamma_num(50, 200)), mpmath.mpf(10) ** -20)
