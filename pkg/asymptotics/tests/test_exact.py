from fractions import Fraction as F

import mpmath
from django.test import SimpleTestCase

from asymptotics.exact import (
    QuadExt,
    exact_from_json,
    exact_to_json,
    format_exact,
    quad_roots,
    simplify,
    square_root,
    squarefree_decomposition,
    to_float,
)
from asymptotics.exceptions import ExactArithmeticError


class SquarefreeTests(SimpleTestCase):
    def test_decomposition(self):
        """72 = 6²·2 and 10092 = 58²·3."""
        self.assertEqual(squarefree_decomposition(72), (6, 2))
        self.assertEqual(squarefree_decomposition(10092), (58, 3))

    def test_large_prime_cofactor_is_rejected(self):
        """A cofactor beyond trial division that is not a square cannot be certified."""
        n = 1000003 * 1000033 * 1000037
        with self.assertRaises(ExactArithmeticError):
            square_root(F(n))


class QuadExtTests(SimpleTestCase):
    def test_conjugate_product_is_rational(self):
        """(1 + √3)(1 − √3) collapses to −2."""
        z = QuadExt(1, 1, 3)
        self.assertEqual(simplify(z * z.conjugate()), F(-2))

    def test_inverse(self):
        """z · z⁻¹ = 1 in Q(√3)."""
        z = QuadExt(F(129, 360), F(-59, 360), 3)
        self.assertEqual(z * z.inverse(), 1)

    def test_exact_sign(self):
        """129/360 − 59√3/360 is positive, 1 − √3 is negative."""
        self.assertEqual(QuadExt(F(129, 360), F(-59, 360), 3).sign(), 1)
        self.assertEqual(QuadExt(1, -1, 3).sign(), -1)
        self.assertTrue(QuadExt(0, 1, 3) > F(17, 10))

    def test_mixed_extensions_raise(self):
        """√2 + √3 leaves every single quadratic field."""
        with self.assertRaises(ExactArithmeticError):
            QuadExt(0, 1, 2) + QuadExt(0, 1, 3)

    def test_non_squarefree_radicand_raises(self):
        with self.assertRaises(ExactArithmeticError):
            QuadExt(0, 1, 12)

    def test_rational_hash_matches_fraction(self):
        self.assertEqual(hash(QuadExt(F(1, 2), 0, 0)), hash(F(1, 2)))


class RootTests(SimpleTestCase):
    def test_square_root_of_fraction(self):
        """√(3/4) = (1/2)√3 and √(9/4) = 3/2."""
        self.assertEqual(square_root(F(3, 4)), QuadExt(0, F(1, 2), 3))
        self.assertEqual(simplify(square_root(F(9, 4))), F(3, 2))

    def test_quad_roots_minus_branch_first(self):
        """y² − y + 5577/32400 has roots (90 ∓ 29√3)/180."""
        roots = quad_roots(1, -1, F(5577, 32400))
        self.assertEqual(roots, [QuadExt(F(1, 2), F(-29, 180), 3), QuadExt(F(1, 2), F(29, 180), 3)])

    def test_omega_roots(self):
        """y² − y + 1/6 has roots (3 ∓ √3)/6."""
        omega, sigma = quad_roots(1, -1, F(1, 6))
        self.assertEqual(omega, QuadExt(F(1, 2), F(-1, 6), 3))
        self.assertEqual(omega + sigma, 1)
        self.assertEqual(omega * sigma, F(1, 6))


class ConversionTests(SimpleTestCase):
    def test_to_float(self):
        with mpmath.workprec(200):
            value = to_float(QuadExt(F(1, 2), F(-1, 6), 3), 200)
            expected = (3 - mpmath.sqrt(3)) / 6
            self.assertLess(abs(value - expected), mpmath.mpf(10) ** -55)

    def test_to_float_needs_double_precision(self):
        with self.assertRaises(ExactArithmeticError):
            to_float(F(1, 3), 20)

    def test_format(self):
        self.assertEqual(format_exact(F(-18029, 29030400)), "-18029/29030400")
        self.assertEqual(format_exact(QuadExt(0, F(-1481, 2332800), 3)), "(-1481/2332800)√3")
        self.assertEqual(format_exact(QuadExt(F(1, 2), F(-29, 180), 3)), "(1/2 - 29/180√3)")

    def test_json(self):
        """Rationals travel as strings, surds as a/b/d objects."""
        surd = QuadExt(F(129, 360), F(-59, 360), 3)
        self.assertEqual(exact_to_json(F(23, 160)), "23/160")
        self.assertEqual(exact_to_json(surd), {"a": "43/120", "b": "-59/360", "d": 3})
        self.assertEqual(exact_from_json({"a": "129/360", "b": "-59/360", "d": 3}), surd)
        self.assertEqual(exact_from_json("7/40"), F(7, 40))
