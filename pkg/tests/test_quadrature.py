import unittest
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

# Add src to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from polyflux.core.errors import UnsupportedSpanError
from polyflux.core.grid import make_grid
from polyflux.core.quadrature import (
    GENERIC_END_WEIGHTS,
    LEFT_ROWS,
    RIGHT_ROWS,
    integrate,
    primed_weights,
    rule_for,
    trapezoid_weights,
    weighted_sum,
)


class TestCoefficientRows(unittest.TestCase):
    def test_left_rows_integrate_constants(self):
        """Every left-anchored row sums exactly to its span."""
        for span, row in LEFT_ROWS.items():
            self.assertEqual(sum(row), Fraction(span), f"left span {span}")
            self.assertEqual(row[0], 0)

    def test_right_rows_integrate_constants(self):
        """Every right-anchored row sums exactly to its span."""
        for span, row in RIGHT_ROWS.items():
            self.assertEqual(sum(row), Fraction(span), f"right span {span}")

    def test_right_span_one_coefficient(self):
        self.assertEqual(RIGHT_ROWS[1][0], Fraction(9, 24))

    def test_generic_end_block(self):
        self.assertEqual(2 * sum(GENERIC_END_WEIGHTS), Fraction(7))

    def test_float_weights_sum_to_span(self):
        """Dense weight vectors reproduce constants to roundoff for every rule family."""
        n = 40
        spans = [(0, hi) for hi in range(1, 8)]
        spans += [(n - s, n) for s in range(1, 7)]
        spans += [(lo, hi) for lo in (0, 3, 11) for hi in (lo + 7, lo + 12, n)]
        for lo, hi in spans:
            w = primed_weights(lo, hi, n)
            self.assertAlmostEqual(float(np.sum(w)), hi - lo, delta=1e-14 * (hi - lo), msg=f"span ({lo}, {hi})")

    def test_weights_are_read_only(self):
        w = primed_weights(0, 20, 20)
        with self.assertRaises(ValueError):
            w[0] = 1.0


class TestRuleSelection(unittest.TestCase):
    def test_families(self):
        self.assertEqual(rule_for(4, 4, 30), "empty")
        self.assertEqual(rule_for(0, 5, 30), "left")
        self.assertEqual(rule_for(26, 30, 30), "right")
        self.assertEqual(rule_for(3, 20, 30), "generic")

    def test_unsupported_interior_span(self):
        """A short span away from both ends has no rule."""
        with self.assertRaises(UnsupportedSpanError):
            primed_weights(3, 6, 50)
        with self.assertRaises(UnsupportedSpanError):
            weighted_sum(np.ones(51), 10, 12)

    def test_span_outside_grid(self):
        with self.assertRaises(UnsupportedSpanError):
            rule_for(0, 31, 30)


class TestWeightedSum(unittest.TestCase):
    def test_empty_span_is_zero(self):
        self.assertEqual(weighted_sum(np.arange(20.0), 7, 7), 0.0)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        f = rng.normal(size=65)
        g = rng.normal(size=65)
        lhs = weighted_sum(2.0 * f - 3.0 * g, 0, 64)
        rhs = 2.0 * weighted_sum(f, 0, 64) - 3.0 * weighted_sum(g, 0, 64)
        self.assertAlmostEqual(lhs, rhs, places=12)

    def test_integrate_accepts_grid_or_spacing(self):
        grid = make_grid(2.0, 32)
        values = grid.nodes**2
        self.assertEqual(integrate(values, grid, 0, 32), integrate(values, grid.dx, 0, 32))

    def test_cubic_exact_on_generic_span(self):
        grid = make_grid(2.0, 32)
        value = integrate(grid.nodes**3, grid, 0, 32)
        self.assertAlmostEqual(value, 4.0, places=12)

    def test_sine_convergence_order(self):
        """Error for the integral of sin over [0, 5] falls at fifth order."""
        exact = 1.0 - np.cos(5.0)
        errors = []
        for n in (50, 100, 200, 400):
            grid = make_grid(5.0, n)
            errors.append(abs(integrate(np.sin(grid.nodes), grid, 0, n) - exact))
        orders = [np.log2(a / b) for a, b in zip(errors, errors[1:])]
        for order in orders:
            self.assertGreaterEqual(order, 4.5)

    def test_trapezoid_weights(self):
        w = trapezoid_weights(1, 4, 10)
        self.assertEqual(list(w[:6]), [0.0, 0.5, 1.0, 1.0, 0.5, 0.0])
        self.assertFalse(np.any(trapezoid_weights(3, 3, 10)))


if __name__ == "__main__":
    unittest.main()
