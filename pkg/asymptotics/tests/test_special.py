from fractions import Fraction as F

import mpmath
from django.test import SimpleTestCase

from asymptotics.exceptions import DomainError
from asymptotics.special import bernoulli, guo_qi_bounds, lngamma_num, polygamma_num, psi_num

PREC = 256
TOL = mpmath.mpf(2) ** -230


class BernoulliTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(bernoulli(0), 1)
        self.assertEqual(bernoulli(1), F(-1, 2))
        self.assertEqual(bernoulli(2), F(1, 6))
        self.assertEqual(bernoulli(3), 0)
        self.assertEqual(bernoulli(12), F(-691, 2730))

    def test_negative_index(self):
        with self.assertRaises(ValueError):
            bernoulli(-1)


class LnGammaTests(SimpleTestCase):
    def test_factorial_values(self):
        """ln Γ(x+1) at x = 4 is ln 24."""
        with mpmath.workprec(PREC):
            self.assertLess(abs(lngamma_num(4, PREC) - mpmath.log(24)), TOL)
            self.assertLess(abs(lngamma_num(0, PREC)), TOL)

    def test_half_integer(self):
        """Γ(3/2) = √π/2."""
        with mpmath.workprec(PREC):
            expected = mpmath.log(mpmath.sqrt(mpmath.pi) / 2)
            self.assertLess(abs(lngamma_num(mpmath.mpf("0.5"), PREC) - expected), TOL)

    def test_matches_mpmath_near_the_pole(self):
        with mpmath.workprec(PREC):
            x = mpmath.mpf("-0.75")
            self.assertLess(abs(lngamma_num(x, PREC) - mpmath.loggamma(x + 1)), TOL)

    def test_outside_domain(self):
        with self.assertRaises(DomainError):
            lngamma_num(-1)
        with self.assertRaises(DomainError):
            lngamma_num(-3.5)


class PolygammaTests(SimpleTestCase):
    def test_digamma_at_one(self):
        with mpmath.workprec(PREC):
            self.assertLess(abs(psi_num(1, PREC) + mpmath.euler), TOL)

    def test_trigamma_at_one(self):
        with mpmath.workprec(PREC):
            self.assertLess(abs(polygamma_num(1, 1, PREC) - mpmath.pi ** 2 / 6), TOL)

    def test_tetragamma_at_one(self):
        with mpmath.workprec(PREC):
            self.assertLess(abs(polygamma_num(2, 1, PREC) + 2 * mpmath.zeta(3)), TOL)

    def test_negative_non_integer_argument(self):
        with mpmath.workprec(PREC):
            x = mpmath.mpf("-2.5")
            self.assertLess(abs(polygamma_num(3, x, PREC) - mpmath.psi(3, x)), mpmath.mpf(2) ** -200)

    def test_digamma_exceeds_log_of_half_shift(self):
        """ψ(11) − ln 10.5 is small and positive."""
        with mpmath.workprec(PREC):
            gap = psi_num(11, PREC) - mpmath.log(mpmath.mpf("10.5"))
        self.assertGreater(gap, 0)
        self.assertLess(gap, mpmath.mpf("1e-3"))

    def test_poles(self):
        for x in (0, -2):
            with self.assertRaises(DomainError):
                psi_num(x)
            with self.assertRaises(DomainError):
                polygamma_num(2, x)

    def test_order_limit(self):
        with self.assertRaises(DomainError):
            polygamma_num(9, 1)


class GuoQiBoundTests(SimpleTestCase):
    def test_first_order_at_two(self):
        with mpmath.workprec(PREC):
            lower, upper = guo_qi_bounds(1, 2, PREC)
        self.assertEqual(lower, mpmath.mpf("0.625"))
        self.assertEqual(upper, mpmath.mpf("0.75"))

    def test_trigamma_inside(self):
        with mpmath.workprec(PREC):
            lower, upper = guo_qi_bounds(1, 3, PREC)
            value = polygamma_num(1, 3, PREC)
        self.assertTrue(lower < value < upper)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            guo_qi_bounds(0, 1)
        with self.assertRaises(DomainError):
            guo_qi_bounds(1, 0)
