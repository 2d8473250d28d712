import unittest
from dataclasses import replace
from unittest import mock

import numpy as np

from core.exceptions import GaugeSingularError, TrackingError, ValidationError
from gbz.curves import circular_band_sweep
from lattice.hamiltonians import build_real_space
from lattice.presets import ssh3
from spectral.eigen import eig_full
from spectral.levels import detect_discrete_levels

from . import zak
from .bands import band_track
from .diagrams import phase_diagram
from .invariance import parameter_set_invariance_check, rescale_first_bond
from .models import PhaseDiagramCell
from .zak import compute_ns_zak, edge_state_prediction, ns_zak_phase


def trimer(t3, n_cells=40):
    return ssh3((2.025, -0.4, t3), (0.4, 0.9, t3), n_cells)


def hermitian_ssh3(t1, t2, t3, n_cells=20):
    hops = (t1, t2, t3)
    return ssh3(hops, hops, n_cells)


class BandTrackTest(unittest.TestCase):

    def test_three_closed_complex_bands(self):
        track = band_track(trimer(1.0), K=512)
        self.assertEqual(track.n_bands, 3)
        self.assertEqual(track.energies.shape, (3, 512))
        self.assertAlmostEqual(track.radius, 2 / 3)
        self.assertGreater(np.abs(track.energies.imag).max(), 1e-3)
        self.assertEqual(len(track.band(0)), 512)

    def test_biorthonormal_samples(self):
        track = band_track(trimer(0.75), K=256)
        for right, left in zip(track.right[::64], track.left[::64]):
            np.testing.assert_allclose(left.conj().T @ right, np.eye(3), atol=1e-9)

    def test_too_few_samples(self):
        with self.assertRaises(ValidationError):
            band_track(trimer(1.0), K=32)


class NsZakPhaseTest(unittest.TestCase):

    def test_hermitian_trivial_trimer(self):
        result = compute_ns_zak(hermitian_ssh3(1.0, 1.0, 0.3))
        self.assertEqual(result.total, 0)

    def test_hermitian_topological_trimer(self):
        hop = np.sqrt(0.3)
        result = compute_ns_zak(hermitian_ssh3(hop, hop, 1.0))
        self.assertEqual(result.total, 4)

    def test_gauge_equivalent_chain_has_same_windings(self):
        hop = np.sqrt(0.3)
        hermitian = compute_ns_zak(hermitian_ssh3(hop, hop, 1.0))
        nonreciprocal = compute_ns_zak(ssh3((1.0, 1.0, 1.0), (0.3, 0.3, 1.0), 20))
        self.assertEqual(nonreciprocal.per_band_winding, hermitian.per_band_winding)

    def test_edge_state_prediction_follows_intercell_hop(self):
        expected = {0.3: 0, 0.4: 0, 0.5: 0, 0.7: 2, 0.75: 2, 0.8: 2, 1.0: 4, 1.1: 4, 1.2: 4}
        for t3, count in expected.items():
            with self.subTest(t3=t3):
                self.assertEqual(edge_state_prediction(trimer(t3)), count)

    def test_prediction_matches_discrete_levels(self):
        for t3 in (0.4, 0.75, 1.1):
            with self.subTest(t3=t3):
                model = trimer(t3)
                eigenvalues = eig_full(build_real_space(model)).eigenvalues
                levels = detect_discrete_levels(eigenvalues, circular_band_sweep(model, K=512).energies)
                self.assertEqual(edge_state_prediction(model), len(levels))

    def test_prediction_matches_discrete_levels_across_transitions(self):
        # Edge states delocalise over 40 cells within 0.02 of a transition
        transitions = (0.6, 0.9)
        mismatches = []
        for t3 in np.round(np.arange(0.30, 1.2001, 0.01), 2):
            if min(abs(t3 - value) for value in transitions) <= 0.02 + 1e-9:
                continue
            model = trimer(t3)
            eigenvalues = eig_full(build_real_space(model)).eigenvalues
            levels = detect_discrete_levels(eigenvalues, circular_band_sweep(model, K=512).energies)
            predicted = edge_state_prediction(model)
            if predicted != len(levels):
                mismatches.append((float(t3), predicted, len(levels)))
        self.assertEqual(mismatches, [])

    def test_left_and_right_windings_agree(self):
        for t3 in (0.5, 0.75, 1.0):
            with self.subTest(t3=t3):
                result = compute_ns_zak(trimer(t3))
                self.assertTrue(result.left_right_agree)
                self.assertEqual(result.theta_r_trace.shape, (3, result.K))

    def test_sublattice_out_of_range(self):
        track = band_track(trimer(1.0), K=512)
        with self.assertRaises(ValidationError):
            ns_zak_phase(track, sublattice=4)

    def test_coarse_tracking_doubles_samples(self):
        model = trimer(1.0)
        calls = []

        def flaky(model, K, radius, ep_threshold):
            calls.append(K)
            if len(calls) == 1:
                raise TrackingError('too coarse')
            return band_track(model, K=K, radius=radius, ep_threshold=ep_threshold)

        with mock.patch.object(zak, 'band_track', side_effect=flaky):
            result = compute_ns_zak(model, K=128)
        self.assertEqual(calls, [128, 256])
        self.assertEqual(result.K, 256)

    def test_tracking_failure_beyond_ceiling(self):
        with mock.patch.object(zak, 'band_track', side_effect=TrackingError('too coarse')):
            with self.assertRaises(TrackingError):
                compute_ns_zak(trimer(1.0), K=512, max_samples=1024)

    def test_vanishing_projection_points_to_transition(self):
        track = band_track(trimer(1.0), K=512)
        right = track.right.copy()
        right[256, 0, 1] = 0
        with mock.patch.object(zak, 'band_track', return_value=replace(track, right=right)):
            with self.assertRaises(GaugeSingularError) as context:
                compute_ns_zak(trimer(1.0), K=512)
        self.assertIn('topological transition', str(context.exception))
        self.assertIn('k = 3.14159', str(context.exception))

    def test_serialization(self):
        payload = compute_ns_zak(trimer(1.0)).to_dict()
        self.assertEqual(payload['total'], 4)
        self.assertEqual(payload['sublattice'], 1)
        self.assertEqual(len(payload['per_band']), 3)


class PhaseDiagramTest(unittest.TestCase):

    def test_cells_reproduce_chain_counts(self):
        # Products of the tL = (2.025, -0.4, t3), tR = (0.4, 0.9, t3) chain
        grid = phase_diagram(1.0, x_range=(0.81, 0.81), y_range=(-0.36, -0.36), resolution=2)
        self.assertEqual([cell.edge_count for cell in grid.cells], [4] * 4)
        self.assertEqual(grid.cell(1, 1).pt_phase, 'PT_BROKEN')

        grid = phase_diagram(0.5, x_range=(3.24, 3.24), y_range=(-1.44, -1.44), resolution=2)
        self.assertEqual([cell.edge_count for cell in grid.cells], [0] * 4)

    def test_axes_are_degenerate(self):
        grid = phase_diagram(1.0, x_range=(-1, 1), y_range=(0.5, 1.5), resolution=3, n_cells=10, K=64)
        self.assertEqual(len(grid.cells), 9)
        for row in range(3):
            cell = grid.cell(1, row)
            self.assertEqual(cell.x, 0.0)
            self.assertEqual(cell.pt_phase, 'DEGENERATE')
            self.assertIsNone(cell.edge_count)
            self.assertFalse(cell.is_transition)

    def test_transition_cell(self):
        cell = PhaseDiagramCell(x=0.5, y=0.5, pt_phase='PT_EXACT', adjacent_counts=(0, 2))
        self.assertTrue(cell.is_transition)

    def test_invalid_arguments(self):
        with self.assertRaises(ValidationError):
            phase_diagram(0.0)
        with self.assertRaises(ValidationError):
            phase_diagram(1.0, resolution=1)


class InvarianceTest(unittest.TestCase):

    def test_rescaling_keeps_product(self):
        model = rescale_first_bond(trimer(1.0), 2.0)
        self.assertAlmostEqual(model.t_left[0] * model.t_right[0], 2.025 * 0.4)
        with self.assertRaises(ValidationError):
            rescale_first_bond(model, 0)

    def test_spectrum_and_windings_are_invariant(self):
        for t3 in (0.5, 0.75, 1.0):
            for alpha in (1.0, 2.0, -1.0, 0.3):
                with self.subTest(t3=t3, alpha=alpha):
                    report = parameter_set_invariance_check(trimer(t3), alpha)
                    self.assertTrue(report.passed, report.to_dict())
                    self.assertLess(report.spectrum_deviation, 1e-8)
