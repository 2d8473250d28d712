import unittest

import numpy as np
from numpy.testing import assert_allclose

from core.exceptions import DegenerateError, GaugeViolationError, NotSeparableError, ValidationError
from gauge.transformations import build_igt, transform_blocks
from lattice.hamiltonians import hopping_blocks
from lattice.models import LatticeModel1D, LatticeModel2D
from lattice.presets import (
    diagonal_hn2d,
    hatano_nelson,
    random_nn_model,
    ssh3,
    third_neighbour_chain,
    with_random_phases,
)

from .curves import (
    beta_pairing_check,
    circular_band_sweep,
    gbz_2d_separable,
    gbz_points,
    gbz_points_from_blocks,
    reference_energies,
    theoretical_radius,
)
from .polynomials import beta_roots, char_poly, middle_pair_ranks, middle_roots

RADIUS_FIG3 = np.sqrt(0.35 / 0.25)


def satisfied_chain(n_cells=40):
    return third_neighbour_chain(0.25, 0.35, 0.1, n_cells)


def violated_chain(n_cells=40):
    return third_neighbour_chain(0.25, 0.35, 0.1, n_cells, shift=0.014)


class CharPolyTest(unittest.TestCase):

    def test_hatano_nelson_coefficients(self):
        polynomial = char_poly(hopping_blocks(hatano_nelson(0.5, 2, 4)), 1.0)
        assert_allclose(polynomial.coefficients, [0.5, -1.0, 2.0])
        self.assertEqual(polynomial.pole_order, 1)
        self.assertEqual(polynomial.degree, 2)
        self.assertTrue(polynomial.balanced)

    def test_long_range_chain_has_degree_six(self):
        polynomial = char_poly(hopping_blocks(satisfied_chain()), 0.3)
        self.assertEqual(polynomial.degree, 6)
        self.assertEqual(polynomial.pole_order, 3)

    def test_roots_solve_the_polynomial(self):
        polynomial = char_poly(hopping_blocks(satisfied_chain()), 0.2 + 0.1j)
        roots = beta_roots(polynomial)
        scale = np.abs(polynomial.coefficients).max() * np.maximum(1, np.abs(roots)) ** polynomial.degree
        self.assertTrue(np.all(np.abs(polynomial(roots)) < 1e-9 * scale))
        moduli = np.abs(roots)
        self.assertTrue(np.all(np.diff(moduli) >= 0))

    def test_trimer_root_product_is_hopping_ratio(self):
        t_left, t_right = (2.025, -0.4, 0.7), (0.4, 0.9, 0.7)
        polynomial = char_poly(hopping_blocks(ssh3(t_left, t_right, 4)), 0.3)
        self.assertEqual(polynomial.degree, 2)
        self.assertAlmostEqual(np.prod(beta_roots(polynomial)), np.prod(t_right) / np.prod(t_left))

    def test_determinant_matches_dense_evaluation(self):
        model = ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 4)
        bloch_matrix = hopping_blocks(model)
        energy = 0.4 - 0.2j
        polynomial = char_poly(bloch_matrix, energy)
        for beta in (0.7, 1.3j, -0.4 + 0.9j):
            matrix = sum(block * beta ** (-offset) for offset, block in bloch_matrix.blocks.items())
            dense = np.linalg.det(matrix - energy * np.eye(3))
            self.assertAlmostEqual(polynomial(beta) / beta ** polynomial.pole_order, dense)

    def test_zero_hop_is_degenerate(self):
        with self.assertRaises(DegenerateError):
            char_poly(hopping_blocks(hatano_nelson(0, 1, 4)), 0.5)

    def test_too_many_sublattices(self):
        model = LatticeModel1D(n_sub=7, n_cells=2, t_right=(1,) * 7, t_left=(1,) * 7)
        with self.assertRaises(ValidationError):
            char_poly(hopping_blocks(model), 0.0)

    def test_middle_pair_ranks(self):
        self.assertEqual(middle_pair_ranks(6), (2, 3))
        self.assertEqual(middle_pair_ranks(2), (0, 1))
        self.assertEqual(middle_pair_ranks(5), (2, 3))

    def test_middle_roots_include_ties(self):
        polynomial = char_poly(hopping_blocks(hatano_nelson(0.5, 2, 4)), 0.0)
        roots = middle_roots(polynomial)
        self.assertEqual(len(roots), 2)
        assert_allclose(np.abs(roots), 2.0)


class GbzCurveTest(unittest.TestCase):

    def test_satisfied_chain_is_a_circle(self):
        model = satisfied_chain()
        curve = gbz_points(model, reference_energies(model))
        self.assertAlmostEqual(curve.radius, RADIUS_FIG3, delta=1e-4)
        self.assertAlmostEqual(curve.theoretical_radius, RADIUS_FIG3)
        self.assertLess(curve.max_radial_deviation, 1e-6 * curve.radius)
        self.assertTrue(curve.is_circular())

    def test_violated_chain_is_not_a_circle(self):
        model = violated_chain()
        curve = gbz_points(model, reference_energies(model))
        self.assertIsNone(curve.theoretical_radius)
        self.assertGreater(curve.max_radial_deviation, 1e-2 * curve.radius)
        summary = curve.to_dict()
        self.assertFalse(summary['circular'])
        self.assertIsNone(summary['radius_theory'])

    def test_trimer_radius(self):
        for t3 in (0.3, 0.75, 1.0):
            model = ssh3((2.025, -0.4, t3), (0.4, 0.9, t3), 40)
            self.assertAlmostEqual(theoretical_radius(model), 2 / 3)
            energies = circular_band_sweep(model, K=128).samples()
            curve = gbz_points(model, energies)
            self.assertLess(abs(curve.radius - 2 / 3), 1e-6 * 2 / 3)
            self.assertTrue(curve.is_circular())

    def test_hatano_nelson_open_chain_energies(self):
        model = hatano_nelson(0.25, 0.35, 30)
        curve = gbz_points(model, reference_energies(model))
        self.assertAlmostEqual(curve.radius, RADIUS_FIG3, places=9)
        self.assertTrue(curve.is_circular())

    def test_random_ensemble_is_circular(self):
        rng = np.random.default_rng(11)
        for trial in range(30):
            model = random_nn_model(rng, n_sub=int(rng.integers(1, 4)), n_cells=10)
            if trial % 3 == 0:
                model = with_random_phases(model, rng)
            energies = circular_band_sweep(model, K=48).samples()
            curve = gbz_points(model, energies)
            expected = theoretical_radius(model)
            self.assertLess(abs(curve.radius / expected - 1), 1e-6, model)
            self.assertLess(curve.max_radial_deviation, 1e-6 * expected, model)

    def test_rescaled_blocks_move_roots_to_unit_circle(self):
        model = ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 10)
        energies = circular_band_sweep(model, K=64).samples()
        rescaled = transform_blocks(hopping_blocks(model), build_igt(model))
        curve = gbz_points_from_blocks(rescaled, energies)
        self.assertAlmostEqual(curve.radius, 1.0, places=9)

    def test_empty_energies(self):
        with self.assertRaises(ValidationError):
            gbz_points(hatano_nelson(0.5, 2, 4), [])

    def test_theoretical_radius_errors(self):
        with self.assertRaises(DegenerateError):
            theoretical_radius(hatano_nelson(0, 1, 4))
        with self.assertRaises(GaugeViolationError):
            theoretical_radius(violated_chain())


class BetaPairingTest(unittest.TestCase):

    def test_path_independent_chain_pairs_roots(self):
        model = satisfied_chain()
        report = beta_pairing_check(model, [0.1, -0.3 + 0.2j, 0.45])
        self.assertTrue(report.passed)
        self.assertLess(report.max_residual, 1e-8)

    def test_negative_ratio_pairs_roots(self):
        model = ssh3((2.025, -0.4, 1.0), (0.4, 0.9, 1.0), 10)
        self.assertTrue(beta_pairing_check(model, [0.2, 1.1j]).passed)

    def test_random_nearest_neighbour_models_pair_roots(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            model = random_nn_model(
                rng, n_sub=int(rng.integers(1, 5)), n_cells=int(rng.integers(4, 13))
            )
            energies = rng.uniform(-1, 1, size=3) + 1j * rng.uniform(-1, 1, size=3)
            with self.subTest(t_right=model.t_right, t_left=model.t_left):
                report = beta_pairing_check(model, energies)
                self.assertTrue(report.passed, report.max_residual)

    def test_violated_chain_fails(self):
        report = beta_pairing_check(violated_chain(), [0.1, 0.3])
        self.assertFalse(report.passed)
        self.assertEqual(len(report.failed_energies), 2)


class BandSweepTest(unittest.TestCase):

    def test_hatano_nelson_band(self):
        sweep = circular_band_sweep(hatano_nelson(0.5, 2, 10), K=32)
        self.assertEqual(sweep.n_bands, 1)
        self.assertAlmostEqual(sweep.radius, 2.0)
        assert_allclose(sweep.energies[0], 2 * np.cos(sweep.k_values), atol=1e-12)

    def test_bands_are_continuous(self):
        sweep = circular_band_sweep(ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 10), K=256)
        steps = np.abs(np.diff(sweep.energies, axis=1))
        self.assertLess(steps.max(), 0.2)

    def test_violated_chain_keeps_every_eigenvalue(self):
        self.assertEqual(len(reference_energies(violated_chain(12))), 12)

    def test_invalid_sample_count(self):
        with self.assertRaises(ValidationError):
            circular_band_sweep(hatano_nelson(0.5, 2, 4), K=0)


class SeparableGbzTest(unittest.TestCase):

    def test_axis_radii(self):
        model = LatticeModel2D(n_cols=8, n_rows=6, t_right=0.2, t_left=0.4, t_up=0.35, t_down=0.65)
        gbz = gbz_2d_separable(model, K=16)
        self.assertAlmostEqual(gbz.radius_x, np.sqrt(0.5))
        self.assertAlmostEqual(gbz.radius_y, np.sqrt(0.35 / 0.65))
        self.assertEqual(gbz.energies.shape, (16, 16))
        assert_allclose(gbz.energies.imag, 0, atol=1e-12)

    def test_diagonal_hops_do_not_separate(self):
        with self.assertRaises(NotSeparableError):
            gbz_2d_separable(diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 8, 6))
