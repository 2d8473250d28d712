import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy.optimize import linear_sum_assignment

from core.exceptions import (
    DegenerateError,
    NearExceptionalPointError,
    NotPseudoHermitianError,
    UnsupportedModelError,
    ValidationError,
)
from gauge.transformations import build_eta_i
from gbz.curves import circular_band_sweep
from lattice.hamiltonians import build_real_space, build_real_space_2d
from lattice.models import LatticeModel1D
from lattice.presets import diagonal_hn2d, hatano_nelson, ssh3, third_neighbour_chain

from .analytic import hn_analytic_spectrum
from .eigen import biorthogonal_system, eig_full, match_by_overlap
from .envelopes import fit_window, localization_lengths, localization_lengths_2d
from .levels import detect_discrete_levels, discrete_mask
from .models import SpectrumPhase
from .phases import classify_spectrum, normalize_coefficients, reconstruct_eta


def spectrum_distance(first, second):
    distances = np.abs(np.subtract.outer(first, second))
    rows, columns = linear_sum_assignment(distances)
    return distances[rows, columns].max()


def trimer(t3, n_cells=40):
    return ssh3((2.025, -0.4, t3), (0.4, 0.9, t3), n_cells)


class EigFullTest(unittest.TestCase):

    def test_identity(self):
        pairs = eig_full(np.eye(4))
        assert_allclose(pairs.eigenvalues, np.ones(4))
        self.assertAlmostEqual(pairs.condition_estimate, 1.0)

    def test_eigenpairs_are_sorted_and_unit_norm(self):
        hamiltonian = build_real_space(ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 6))
        pairs = eig_full(hamiltonian)
        keys = list(zip(pairs.eigenvalues.real, pairs.eigenvalues.imag))
        self.assertEqual(keys, sorted(keys))
        assert_allclose(np.linalg.norm(pairs.right, axis=0), 1.0)
        residual = hamiltonian @ pairs.right - pairs.right * pairs.eigenvalues
        self.assertLess(np.abs(residual).max(), 1e-10)

    def test_largest_component_is_real_positive(self):
        pairs = eig_full(build_real_space(hatano_nelson(0.5, 2, 7)))
        peaks = pairs.right[np.argmax(np.abs(pairs.right), axis=0), np.arange(7)]
        assert_allclose(peaks.imag, 0, atol=1e-14)
        self.assertTrue(np.all(peaks.real > 0))

    def test_skin_modes_stay_accurate_on_long_chains(self):
        model = hatano_nelson(0.5, 2, 40)
        expected = hn_analytic_spectrum(0.5, 2, 40).eigenvalues
        self.assertLess(spectrum_distance(eig_full(build_real_space(model)).eigenvalues, expected), 1e-8)

    def test_jordan_block_has_vanishing_condition_estimate(self):
        jordan = np.array([[0.0, 1.0], [0.0, 0.0]])
        self.assertLess(eig_full(jordan).condition_estimate, 1e-8)
        with self.assertRaises(NearExceptionalPointError):
            biorthogonal_system(jordan)

    def test_rejects_non_square_input(self):
        with self.assertRaises(ValidationError):
            eig_full(np.ones((2, 3)))
        with self.assertRaises(ValidationError):
            eig_full(np.zeros((0, 0)))


class BiorthogonalSystemTest(unittest.TestCase):

    def setUp(self):
        self.hamiltonian = build_real_space(ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 8))
        self.system = biorthogonal_system(self.hamiltonian)

    def test_left_and_right_are_biorthonormal(self):
        self.assertLess(self.system.biorthogonality_residual(), 1e-10)

    def test_eigen_equations(self):
        system = self.system
        right_residual = self.hamiltonian @ system.right - system.right * system.eigenvalues
        left_residual = (
            self.hamiltonian.conj().T @ system.left - system.left * system.eigenvalues.conj()
        )
        self.assertLess(np.abs(right_residual).max(), 1e-9)
        self.assertLess(np.abs(left_residual).max(), 1e-9)

    def test_take(self):
        part = self.system.take([0, 3])
        self.assertEqual(part.size, 2)
        assert_allclose(part.eigenvalues, self.system.eigenvalues[[0, 3]])

    def test_match_by_overlap_recovers_permutation(self):
        vectors = self.system.right
        permutation = np.random.default_rng(7).permutation(vectors.shape[1])
        order, overlaps = match_by_overlap(vectors, vectors[:, permutation])
        assert_allclose(vectors[:, permutation][:, order], vectors)
        assert_allclose(overlaps, 1.0)


class AnalyticSpectrumTest(unittest.TestCase):

    def test_doctest_values(self):
        values = hn_analytic_spectrum(0.5, 2, 3).eigenvalues
        assert_allclose(values, [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-12)

    def test_matches_numerical_spectrum(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            t_left, t_right = rng.uniform(0.2, 2.0, 2) * rng.choice([-1, 1], 2)
            n_cells = int(rng.integers(2, 20))
            model = hatano_nelson(t_left, t_right, n_cells)
            analytic = hn_analytic_spectrum(t_left, t_right, n_cells)
            numeric = eig_full(build_real_space(model))
            scale = max(1.0, np.abs(analytic.eigenvalues).max())
            self.assertLess(spectrum_distance(analytic.eigenvalues, numeric.eigenvalues), 1e-9 * scale)

            hamiltonian = build_real_space(model)
            right = analytic.right / np.linalg.norm(analytic.right, axis=0)
            self.assertLess(np.abs(hamiltonian @ right - right * analytic.eigenvalues).max(), 1e-9 * scale)
            self.assertLess(analytic.biorthogonality_residual(), 1e-9)

    def test_negative_ratio_gives_imaginary_spectrum(self):
        values = hn_analytic_spectrum(-0.5, 2, 6).eigenvalues
        assert_allclose(values.real, 0, atol=1e-12)
        self.assertTrue(np.all(values.imag != 0))

    def test_zero_amplitude(self):
        with self.assertRaises(DegenerateError):
            hn_analytic_spectrum(0, 1, 4)


class ClassifySpectrumTest(unittest.TestCase):

    def test_conjugate_pair(self):
        phase = classify_spectrum([1j, -1j, 0.5])
        self.assertEqual(phase.phase, SpectrumPhase.Phase.PT_BROKEN)
        self.assertEqual(phase.pairing, ((0, 1),))
        self.assertEqual(phase.real_indices, (2,))

    def test_real_spectrum(self):
        phase = classify_spectrum(eig_full(build_real_space(hatano_nelson(0.5, 2, 9))).eigenvalues)
        self.assertEqual(phase.phase, SpectrumPhase.Phase.PT_EXACT)
        self.assertEqual(len(phase.real_indices), 9)

    def test_imaginary_hatano_nelson(self):
        eigenvalues = eig_full(build_real_space(hatano_nelson(-0.5, 2, 6))).eigenvalues
        phase = classify_spectrum(eigenvalues)
        self.assertEqual(phase.phase, SpectrumPhase.Phase.PT_BROKEN)
        self.assertEqual(len(phase.pairing), 3)

    def test_missing_partner(self):
        with self.assertRaises(NotPseudoHermitianError):
            classify_spectrum([1j, 0.5])
        with self.assertRaises(NotPseudoHermitianError):
            classify_spectrum([-1j, 0.5])

    def test_ambiguous_partner(self):
        values = [1j, -1j + 9e-4, -1j - 9e-4]
        with self.assertRaisesRegex(NotPseudoHermitianError, 'ambiguous'):
            classify_spectrum(values, tol=1e-3)

    def test_degenerate_pairs(self):
        phase = classify_spectrum([1j, 1j, -1j, -1j])
        self.assertEqual(len(phase.pairing), 2)


class MetricReconstructionTest(unittest.TestCase):

    def reconstruct(self, model):
        system = biorthogonal_system(build_real_space(model))
        phase = classify_spectrum(system.eigenvalues)
        eta = build_eta_i(model).diag
        normalized, signs = normalize_coefficients(system, phase, eta)
        return eta, phase, normalized, signs

    def test_pt_exact_signs_give_eta_i(self):
        eta, phase, normalized, signs = self.reconstruct(hatano_nelson(0.5, 2, 8))
        self.assertEqual(signs, [1] * 8)
        reconstructed = reconstruct_eta(normalized, phase, signs)
        assert_allclose(reconstructed, np.diag(eta), atol=1e-8 * np.abs(eta).max())
        self.assertTrue(np.all(np.linalg.eigvalsh(reconstructed) > 0))

    def test_pt_broken_metric_is_indefinite(self):
        model = hatano_nelson(-0.5, 2, 7)
        eta, phase, normalized, signs = self.reconstruct(model)
        self.assertEqual(phase.phase, SpectrumPhase.Phase.PT_BROKEN)
        self.assertEqual(len(signs), 1)

        reconstructed = reconstruct_eta(normalized, phase, signs)
        assert_allclose(reconstructed, np.diag(eta), atol=1e-8 * np.abs(eta).max())
        hamiltonian = build_real_space(model)
        assert_allclose(reconstructed @ hamiltonian, hamiltonian.conj().T @ reconstructed, atol=1e-9)
        spectrum = np.linalg.eigvalsh(reconstructed)
        self.assertTrue(spectrum.min() < 0 < spectrum.max())

    def test_any_signs_give_a_metric(self):
        model = ssh3((1, 0.5, 2), (0.3, 1.5, 0.7), 4)
        system = biorthogonal_system(build_real_space(model))
        phase = classify_spectrum(system.eigenvalues)
        signs = [(-1) ** index for index in range(len(phase.real_indices))]
        eta = reconstruct_eta(system, phase, signs)
        hamiltonian = build_real_space(model)
        assert_allclose(eta, eta.conj().T, atol=1e-10)
        assert_allclose(eta @ hamiltonian, hamiltonian.conj().T @ eta, atol=1e-8 * np.abs(eta).max())

    def test_sign_validation(self):
        model = hatano_nelson(0.5, 2, 3)
        system = biorthogonal_system(build_real_space(model))
        phase = classify_spectrum(system.eigenvalues)
        with self.assertRaises(ValidationError):
            reconstruct_eta(system, phase, [1, 1])
        with self.assertRaises(ValidationError):
            reconstruct_eta(system, phase, [1, 2, 1])


class LocalizationLengthsTest(unittest.TestCase):

    def test_fit_window_is_mirror_symmetric(self):
        self.assertEqual(fit_window(40), (10, 31))
        self.assertEqual(fit_window(6), (2, 5))

    def test_hatano_nelson_rates(self):
        model = hatano_nelson(0.5, 2, 30)
        fit = localization_lengths(eig_full(build_real_space(model)), model)
        self.assertAlmostEqual(fit.theoretical_kappa, np.log(2))
        finite = fit.per_state_kappa[np.isfinite(fit.per_state_kappa)]
        assert_allclose(finite, np.log(2), rtol=1e-6)

    def test_long_range_chain_rates(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 40)
        fit = localization_lengths(eig_full(build_real_space(model)), model)
        expected = 0.5 * np.log(1.4)
        finite = fit.per_state_kappa[np.isfinite(fit.per_state_kappa)]
        self.assertGreater(len(finite), 36)
        self.assertLess(np.abs(finite / expected - 1).max(), 0.02)

    def test_reciprocal_chain_has_no_skin_effect(self):
        model = hatano_nelson(1, 1, 30)
        fit = localization_lengths(eig_full(build_real_space(model)), model)
        assert_allclose(np.nan_to_num(fit.per_state_kappa), 0, atol=1e-8)

    def test_pt_broken_rates_mirror_pt_exact_counterpart(self):
        broken = ssh3((2.025, -0.4, 0.7), (0.4, 0.9, 0.7), 60)
        exact = ssh3((2.025, 0.4, 0.7), (0.4, 0.9, 0.7), 60)
        distributions = []
        for model in (broken, exact):
            fit = localization_lengths(eig_full(build_real_space(model)), model)
            finite = np.sort(fit.per_state_kappa[np.isfinite(fit.per_state_kappa)])
            self.assertGreater(len(finite), 150)
            # Deciles leave room for the handful of boundary states
            distributions.append(np.percentile(finite, [10, 25, 50, 75, 90]))
            self.assertAlmostEqual(fit.theoretical_kappa, 0.5 * np.log(4 / 9))
        assert_allclose(distributions[0], distributions[1], rtol=0.02)

    def test_indices_select_states(self):
        model = hatano_nelson(0.5, 2, 12)
        fit = localization_lengths(eig_full(build_real_space(model)), model, indices=[1, 4])
        self.assertEqual(list(fit.indices), [1, 4])
        self.assertEqual(len(fit.per_state_kappa), 2)

    def test_periodic_chain_is_unsupported(self):
        model = hatano_nelson(0.5, 2, 12, LatticeModel1D.Boundary.PBC)
        with self.assertRaises(UnsupportedModelError):
            localization_lengths(eig_full(build_real_space(model)), model)

    def test_short_chain(self):
        model = hatano_nelson(0.5, 2, 4)
        with self.assertRaises(ValidationError):
            localization_lengths(eig_full(build_real_space(model)), model)


class LocalizationLengths2DTest(unittest.TestCase):

    def test_diagonal_lattice_rates(self):
        model = diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 20, 16)
        system = biorthogonal_system(build_real_space_2d(model))
        self.assertLess(np.abs(system.eigenvalues.imag).max(), 1e-9 * np.abs(system.eigenvalues).max())

        fit = localization_lengths_2d(system, model)
        self.assertAlmostEqual(fit.theoretical_kappa_x, -0.5 * np.log(2))
        self.assertAlmostEqual(fit.theoretical_kappa_y, 0.5 * np.log(7 / 13))
        summary = fit.to_dict()
        self.assertLess(abs(summary['median_kappa_x'] / fit.theoretical_kappa_x - 1), 0.03)
        self.assertLess(abs(summary['median_kappa_y'] / fit.theoretical_kappa_y - 1), 0.03)

    def test_full_size_lattice_stays_real(self):
        model = diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 30, 40)
        system = biorthogonal_system(build_real_space_2d(model))
        self.assertLess(np.abs(system.eigenvalues.imag).max(), 1e-9 * np.abs(system.eigenvalues).max())

        summary = localization_lengths_2d(system, model).to_dict()
        self.assertLess(abs(summary['median_kappa_x'] / (-0.5 * np.log(2)) - 1), 0.03)
        self.assertLess(abs(summary['median_kappa_y'] / (0.5 * np.log(7 / 13)) - 1), 0.03)

    def test_small_lattice(self):
        model = diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 3, 6)
        system = biorthogonal_system(build_real_space_2d(model))
        with self.assertRaises(ValidationError) as context:
            localization_lengths_2d(system, model)
        self.assertIn('Mx', context.exception.error_dict)


class DiscreteLevelsTest(unittest.TestCase):

    def count_levels(self, t3):
        model = trimer(t3)
        eigenvalues = eig_full(build_real_space(model)).eigenvalues
        sweep = circular_band_sweep(model, K=512)
        return len(detect_discrete_levels(eigenvalues, sweep.energies))

    def test_level_count_follows_intercell_hop(self):
        self.assertEqual(self.count_levels(0.3), 0)
        self.assertEqual(self.count_levels(0.75), 2)
        self.assertEqual(self.count_levels(1.0), 4)

    def test_isolated_point(self):
        levels = detect_discrete_levels([0, 5], np.linspace(-1, 1, 50))
        assert_allclose(levels, [5])

    def test_level_just_beyond_a_band_tip(self):
        band = 1j * np.linspace(-0.6, 0.6, 512)
        bulk = 1j * np.linspace(-0.59, 0.59, 40)
        eigenvalues = np.concatenate((bulk, [0.6025j, -0.6025j]))
        mask = discrete_mask(eigenvalues, band[None, :])
        assert_allclose(np.flatnonzero(mask), [40, 41])
        self.assertFalse(discrete_mask(eigenvalues, band, gap_threshold=0.05).any())

    def test_scattered_band_keeps_its_bulk(self):
        rng = np.random.default_rng(5)
        band = np.exp(1j * np.linspace(0, 2 * np.pi, 256, endpoint=False))
        bulk = np.exp(1j * rng.uniform(0, 2 * np.pi, 60)) * (1 + rng.uniform(-1e-3, 1e-3, 60))
        eigenvalues = np.concatenate((bulk, [0.3 + 0.2j]))
        mask = discrete_mask(eigenvalues, np.vstack((band, 2 * band)))
        assert_allclose(np.flatnonzero(mask), [60])

    def test_full_sweep_counts_match_sample_cloud_when_threshold_is_explicit(self):
        model = trimer(1.0)
        eigenvalues = eig_full(build_real_space(model)).eigenvalues
        sweep = circular_band_sweep(model, K=512)
        np.testing.assert_array_equal(
            discrete_mask(eigenvalues, sweep.energies, gap_threshold=0.05),
            discrete_mask(eigenvalues, sweep.samples(), gap_threshold=0.05),
        )

    def test_without_samples_everything_is_discrete(self):
        self.assertTrue(discrete_mask([0.0, 1.0], []).all())
