import unittest
import sys
from pathlib import Path

import numpy as np

# Add src to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from polyflux.core.config import WenoConfig
from polyflux.core.weno import (
    IDEAL_WEIGHTS,
    PRINTED_WEIGHTS,
    GhostedFluxes,
    divergence,
    flux_divergence,
    interface_fluxes,
    nonlinear_weights,
    reconstruct_half_flux,
    smoothness_indicators,
    upwind1_divergence,
)


class TestIndicatorsAndWeights(unittest.TestCase):
    def test_linear_data_standard_indicator(self):
        S = smoothness_indicators(1.0, 2.0, 3.0, 4.0, 5.0)
        self.assertEqual([float(s) for s in S], [1.0, 1.0, 1.0])

    def test_linear_data_printed_indicator(self):
        S = smoothness_indicators(1.0, 2.0, 3.0, 4.0, 5.0, indicator="printed")
        self.assertEqual([float(s) for s in S], [1.0, 2.0, 1.0])

    def test_equal_indicators_give_ideal_weights(self):
        w = nonlinear_weights(0.0, 0.0, 0.0)
        for got, ideal in zip(w, IDEAL_WEIGHTS):
            self.assertAlmostEqual(float(got), ideal, places=15)

    def test_equal_indicators_give_printed_weights(self):
        w = nonlinear_weights(0.0, 0.0, 0.0, ideal=PRINTED_WEIGHTS)
        for got, ideal in zip(w, PRINTED_WEIGHTS):
            self.assertAlmostEqual(float(got), ideal, places=15)

    def test_smooth_stencil_weights_near_ideal(self):
        x = 0.02 * np.arange(5) + 2.0
        w = nonlinear_weights(*smoothness_indicators(*np.sin(x)))
        for got, ideal in zip(w, IDEAL_WEIGHTS):
            self.assertAlmostEqual(float(got), ideal, delta=0.02)

    def test_weights_avoid_discontinuity(self):
        """A jump inside the first two sub-stencils pushes weight to the third."""
        S = smoothness_indicators(0.0, 0.0, 1.0, 1.0, 1.0)
        w1, w2, w3 = nonlinear_weights(*S)
        self.assertGreater(float(w3), 0.99)
        self.assertAlmostEqual(float(w1 + w2 + w3), 1.0, places=15)


class TestReconstruction(unittest.TestCase):
    def test_constant_is_reproduced(self):
        for orientation in ("plus", "minus"):
            self.assertAlmostEqual(reconstruct_half_flux([2.0] * 5, orientation), 2.0, places=14)

    def test_linear_data(self):
        """Plus reads H_{k-2..k+2} and minus H_{k+1}, H_{k+2}, H_{k+3}, H_k, H_{k-1}; both give H at k+1/2."""
        plus = reconstruct_half_flux([1.0, 2.0, 3.0, 4.0, 5.0], "plus")
        self.assertAlmostEqual(plus, 3.5, places=13)
        minus = reconstruct_half_flux([4.0, 5.0, 6.0, 3.0, 2.0], "minus")
        self.assertAlmostEqual(minus, 3.5, places=13)

    def test_unknown_orientation(self):
        with self.assertRaises(ValueError):
            reconstruct_half_flux([0.0] * 5, "left")


class TestFluxDivergence(unittest.TestCase):
    def test_ghost_padding(self):
        g = GhostedFluxes.from_nodal(np.ones(17), np.zeros(17))
        self.assertEqual(len(g.Hplus), 23)
        self.assertEqual(g.n, 16)
        self.assertEqual(g.Hplus[2], 0.0)
        self.assertEqual(g.Hplus[3], 1.0)

    def test_constant_field_has_zero_interior_divergence(self):
        n = 40
        g = GhostedFluxes.from_nodal(np.full(n + 1, 3.0), np.full(n + 1, -1.0))
        D = flux_divergence(g, 0.1)
        self.assertEqual(D.shape, (n,))
        # nodes 4..N-4 see no ghost value
        self.assertTrue(np.all(D[3 : n - 4] == 0.0))

    def test_linear_field_interior(self):
        n = 40
        dx = 0.05
        x = dx * np.arange(n + 1)
        g = GhostedFluxes.from_nodal(2.0 * x + 1.0, np.zeros(n + 1))
        D = flux_divergence(g, dx)
        self.assertTrue(np.allclose(D[3 : n - 4], 2.0, rtol=1e-10))

    def test_fifth_order_on_smooth_flux(self):
        """Max error of d/dx sin(x) away from the ends falls at fifth order."""
        errors = []
        for n in (100, 200, 400):
            dx = 6.0 / n
            x = dx * np.arange(n + 1)
            H = np.sin(x)
            D = flux_divergence(GhostedFluxes.from_nodal(0.5 * H, 0.5 * H), dx)
            nodes = x[1:]
            mask = (nodes >= 2.0) & (nodes <= 4.0)
            errors.append(float(np.max(np.abs(D[mask] - np.cos(nodes[mask])))))
        orders = [np.log2(a / b) for a, b in zip(errors, errors[1:])]
        for order in orders:
            self.assertGreaterEqual(order, 4.0)

    @staticmethod
    def _one_sided_errors(sizes, **kwargs):
        """Max error of d/dx sin(x) on [2, 4] with the whole flux in H⁺."""
        errors = []
        for n in sizes:
            dx = 6.0 / n
            x = dx * np.arange(n + 1)
            H = np.sin(x)
            D = flux_divergence(GhostedFluxes.from_nodal(H, np.zeros(n + 1)), dx, **kwargs)
            nodes = x[1:]
            mask = (nodes >= 2.0) & (nodes <= 4.0)
            errors.append(float(np.max(np.abs(D[mask] - np.cos(nodes[mask])))))
        return errors

    def test_fifth_order_one_sided(self):
        errors = self._one_sided_errors((100, 200, 400))
        for a, b in zip(errors, errors[1:]):
            self.assertGreaterEqual(np.log2(a / b), 4.5)

    def test_printed_weights_third_order(self):
        errors = self._one_sided_errors((100, 200, 400), weights="printed")
        for a, b in zip(errors, errors[1:]):
            self.assertGreater(np.log2(a / b), 2.5)
            self.assertLess(np.log2(a / b), 3.5)

    def test_epsilon_below_discretization_error(self):
        n = 100
        dx = 6.0 / n
        x = dx * np.arange(n + 1)
        g = GhostedFluxes.from_nodal(np.sin(x), np.zeros(n + 1))
        nodes = x[1:]
        mask = (nodes >= 2.0) & (nodes <= 4.0)
        coarse = flux_divergence(g, dx, epsilon=1e-6)[mask]
        fine = flux_divergence(g, dx, epsilon=1e-8)[mask]
        error = float(np.max(np.abs(coarse - np.cos(nodes[mask]))))
        self.assertLess(float(np.max(np.abs(coarse - fine))), 0.1 * error)

    def test_closed_right_interface(self):
        n = 40
        x = 0.1 * np.arange(n + 1)
        bump = np.exp(-((x - 3.8) ** 2) / 0.05)
        g = GhostedFluxes.from_nodal(bump, np.zeros(n + 1))
        self.assertEqual(interface_fluxes(g)[-1], 0.0)
        self.assertGreater(interface_fluxes(g, right_boundary="open")[-1], 0.0)
        # the sum telescopes to the flux through R
        self.assertAlmostEqual(float(np.sum(flux_divergence(g, 0.1))) * 0.1, 0.0, places=12)
        open_outflow = float(np.sum(flux_divergence(g, 0.1, right_boundary="open"))) * 0.1
        self.assertAlmostEqual(open_outflow, float(interface_fluxes(g, right_boundary="open")[-1]), places=12)

    def test_upwind_linear_flux(self):
        n = 40
        dx = 0.1
        x = dx * np.arange(n + 1)
        g = GhostedFluxes.from_nodal(x, -x)
        D = upwind1_divergence(g, dx)
        self.assertTrue(np.allclose(D[: n - 1], 0.0, atol=1e-12))
        plus_only = GhostedFluxes.from_nodal(x, 0 * x)
        closed = upwind1_divergence(plus_only, dx)
        self.assertTrue(np.allclose(closed[: n - 1], 1.0))
        self.assertAlmostEqual(float(closed[-1]), -x[n - 1] / dx, places=10)
        self.assertTrue(np.allclose(upwind1_divergence(plus_only, dx, right_boundary="open"), 1.0))

    def test_dispatch(self):
        n = 20
        g = GhostedFluxes.from_nodal(np.linspace(0.0, 1.0, n + 1), np.zeros(n + 1))
        self.assertTrue(np.array_equal(divergence(g, 0.05, WenoConfig(scheme="upwind1")), upwind1_divergence(g, 0.05)))
        self.assertTrue(np.array_equal(divergence(g, 0.05, WenoConfig()), flux_divergence(g, 0.05)))
        self.assertTrue(
            np.array_equal(
                divergence(g, 0.05, WenoConfig(right_boundary="open", weno_weights="printed")),
                flux_divergence(g, 0.05, weights="printed", right_boundary="open"),
            )
        )


if __name__ == "__main__":
    unittest.main()
