import json
import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from core.exceptions import (
    DegenerateError,
    GaugeViolationError,
    PTBrokenError,
    SymmetryAbsentError,
    UnsupportedModelError,
    ValidationError,
)
from lattice.hamiltonians import build_real_space, build_real_space_2d, hopping_blocks
from lattice.models import LatticeModel1D, LatticeModel2D, LongRangeHop
from lattice.presets import (
    diagonal_hn2d,
    hatano_nelson,
    random_nn_model,
    ssh3,
    third_neighbour_chain,
    with_random_phases,
)

from .models import EtaMetric, GaugeReport
from .paths import check_path_independence, modulus_grading, solve_gauge_2d
from .transformations import (
    build_eta_i,
    build_igt,
    hermitian_counterpart,
    nn_gauge_ratios,
    pseudo_hermiticity_residual,
    reflection_symmetry_generator,
    transform_blocks,
)


def satisfied_chain(n_cells=12):
    return third_neighbour_chain(0.25, 0.35, 0.1, n_cells)


def violated_chain(n_cells=12):
    return third_neighbour_chain(0.25, 0.35, 0.1, n_cells, shift=0.014)


class GaugeRatiosTest(unittest.TestCase):

    def test_reciprocal_model_has_unit_ratios(self):
        model = ssh3((0.3, 0.8, 1.1), (0.3, 0.8, 1.1), 4)
        assert_allclose(nn_gauge_ratios(model), np.ones(4))

    def test_three_sublattice_ratios(self):
        model = ssh3((0.5, 1, 2), (2, 1, 0.5), 3)
        ratios = nn_gauge_ratios(model)
        expected = [1.0]
        for index in range(1, 4):
            expected.append(np.sqrt(np.prod([2, 1, 0.5][:index]) / np.prod([0.5, 1, 2][:index])))
        assert_allclose(ratios, [1, 2, 2, 1])
        assert_allclose(ratios, expected)

    def test_hatano_nelson_ratio(self):
        ratios = nn_gauge_ratios(hatano_nelson(0.5, 2, 5))
        assert_allclose(ratios, [1, 2])

    def test_negative_ratio_gives_imaginary_root(self):
        ratios = nn_gauge_ratios(hatano_nelson(-0.5, 2, 5))
        assert_allclose(ratios[1], 2j)

    def test_zero_amplitude_is_degenerate(self):
        with self.assertRaises(DegenerateError):
            nn_gauge_ratios(ssh3((1, 0, 1), (1, 1, 1), 3))


class BuildIgtTest(unittest.TestCase):

    def test_hatano_nelson_diagonal(self):
        scaling = build_igt(hatano_nelson(0.5, 2, 3))
        expected = [2.0 ** power for power in range(1, 4)]
        assert_allclose(scaling.diag, expected)
        self.assertEqual(scaling.sub_factors[0], 1)

    def test_reciprocal_model_has_unit_diagonal(self):
        scaling = build_igt(ssh3((0.4, 0.9, 0.7), (0.4, 0.9, 0.7), 4))
        assert_allclose(scaling.diag, np.ones(12))

    def test_diagonal_layout(self):
        model = ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 4)
        scaling = build_igt(model)
        for cell in range(1, 5):
            for sublattice in range(1, 4):
                expected = scaling.sub_factors[sublattice - 1] * scaling.cell_factor ** cell
                self.assertAlmostEqual(scaling.diag[model.site(cell, sublattice)], expected)

    def test_complex_amplitudes_balance_transformed_blocks(self):
        model = with_random_phases(ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 4), np.random.default_rng(3))
        scaling = build_igt(model)
        transformed = transform_blocks(hopping_blocks(model), scaling)
        products = np.abs(np.prod(model.t_right) / np.prod(model.t_left))
        self.assertAlmostEqual(abs(scaling.cell_factor), np.sqrt(products))
        intracell = transformed.block(0)
        assert_allclose(np.abs(intracell[1, 0]), np.abs(intracell[0, 1]))
        assert_allclose(np.abs(transformed.block(1)[0, 2]), np.abs(transformed.block(-1)[2, 0]))


class BuildEtaTest(unittest.TestCase):

    def test_hatano_nelson_metric(self):
        metric = build_eta_i(hatano_nelson(0.5, 2, 3))
        assert_allclose(metric.diag, [1 / 4, 1 / 16, 1 / 64])
        self.assertEqual(metric.definiteness, EtaMetric.Definiteness.POSITIVE_DEFINITE)

    def test_metric_is_inverse_square_of_gauge(self):
        model = ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 4)
        assert_allclose(build_eta_i(model).diag, 1 / build_igt(model).diag ** 2)

    def test_reciprocal_model_gives_identity(self):
        metric = build_eta_i(ssh3((0.4, 0.9, 0.7), (0.4, 0.9, 0.7), 4))
        assert_allclose(metric.diag, np.ones(12))

    def test_negative_hop_gives_indefinite_metric(self):
        metric = build_eta_i(ssh3((2.025, -0.4, 0.7), (0.4, 0.9, 0.7), 4))
        self.assertEqual(metric.definiteness, EtaMetric.Definiteness.INDEFINITE)
        self.assertTrue(np.all(np.isreal(metric.diag)))
        self.assertTrue(np.any(metric.diag < 0))

    def test_complex_amplitudes_are_unsupported(self):
        with self.assertRaises(UnsupportedModelError):
            build_eta_i(ssh3((1, 1j, 1), (1, 1, 1), 3))

    def test_violated_long_range_model(self):
        with self.assertRaises(GaugeViolationError):
            build_eta_i(violated_chain())


class PseudoHermiticityTest(unittest.TestCase):

    def test_hermitian_matrix_with_identity_metric(self):
        matrix = build_real_space(ssh3((0.4, 0.9, 0.7), (0.4, 0.9, 0.7), 4))
        self.assertEqual(pseudo_hermiticity_residual(matrix, np.ones(12)), 0.0)

    def test_full_metric_matches_diagonal(self):
        model = ssh3((2.025, -0.4, 0.7), (0.4, 0.9, 0.7), 3)
        matrix = build_real_space(model)
        metric = build_eta_i(model)
        self.assertAlmostEqual(
            pseudo_hermiticity_residual(matrix, metric.diag),
            pseudo_hermiticity_residual(matrix, metric.matrix),
        )

    def test_random_real_models_are_eta_pseudo_hermitian(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            model = random_nn_model(
                rng, n_sub=int(rng.integers(1, 5)), n_cells=int(rng.integers(2, 13))
            )
            matrix = build_real_space(model)
            metric = build_eta_i(model)
            # Scale by the metric so large R_M^n does not hide the residual
            bound = 1e-12 * linalg.norm(matrix) * np.abs(metric.diag).max()
            with self.subTest(t_right=model.t_right, t_left=model.t_left):
                self.assertLessEqual(pseudo_hermiticity_residual(matrix, metric.diag), bound)

    def test_violated_model_with_nearest_neighbour_metric(self):
        model = violated_chain()
        nearest = LatticeModel1D(1, model.n_cells, model.t_right, model.t_left)
        residual = pseudo_hermiticity_residual(build_real_space(model), build_eta_i(nearest).diag)
        self.assertGreater(residual, 1e-6)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValidationError):
            pseudo_hermiticity_residual(np.eye(4), np.ones(3))


class HermitianCounterpartTest(unittest.TestCase):

    def test_hatano_nelson_becomes_uniform(self):
        matrix = hermitian_counterpart(hatano_nelson(0.5, 2, 6))
        expected = np.diag(np.ones(5), 1) + np.diag(np.ones(5), -1)
        assert_allclose(matrix, expected, atol=1e-12)

    def test_reciprocal_model_is_unchanged(self):
        model = ssh3((0.4, 0.9, 0.7), (0.4, 0.9, 0.7), 4)
        assert_allclose(hermitian_counterpart(model), build_real_space(model), atol=1e-12)

    def test_counterpart_is_hermitian_and_isospectral(self):
        model = ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 5)
        counterpart = hermitian_counterpart(model)
        assert_allclose(counterpart, counterpart.conj().T, atol=1e-12)
        original = linalg.eigvals(build_real_space(model))
        hermitian = linalg.eigvalsh(counterpart)
        distances = np.abs(np.subtract.outer(original, hermitian))
        rows, columns = linear_sum_assignment(distances)
        self.assertLess(distances[rows, columns].max(), 1e-9)

    def test_satisfied_long_range_chain(self):
        counterpart = hermitian_counterpart(satisfied_chain())
        assert_allclose(counterpart, counterpart.conj().T, atol=1e-10)

    def test_pt_broken_chain(self):
        with self.assertRaises(PTBrokenError):
            hermitian_counterpart(hatano_nelson(-0.5, 2, 6))

    def test_periodic_chain_is_unsupported(self):
        with self.assertRaises(UnsupportedModelError):
            hermitian_counterpart(hatano_nelson(0.5, 2, 6, boundary=LatticeModel1D.Boundary.PBC))

    def test_positive_metric_iff_counterpart_exists(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            model = random_nn_model(rng, n_sub=int(rng.integers(1, 4)), n_cells=4)
            positive = build_eta_i(model).definiteness == EtaMetric.Definiteness.POSITIVE_DEFINITE
            try:
                hermitian_counterpart(model)
                exists = True
            except PTBrokenError:
                exists = False
            self.assertEqual(positive, exists)


class PathIndependenceTest(unittest.TestCase):

    def test_nearest_neighbour_chains_are_consistent(self):
        positive = check_path_independence(ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 4))
        negative = check_path_independence(ssh3((2.025, -0.4, 0.7), (0.4, 0.9, 0.7), 4))
        self.assertEqual(positive.status, GaugeReport.Status.HERMITIZABLE)
        self.assertEqual(negative.status, GaugeReport.Status.ETA_I_PSEUDO)

    def test_complex_ratios(self):
        model = ssh3((1, 1j, 1), (1, 1, 1), 3)
        report = check_path_independence(model)
        self.assertEqual(report.status, GaugeReport.Status.COMPLEX_SCALABLE)

    def test_satisfied_long_range_chain(self):
        report = check_path_independence(satisfied_chain())
        self.assertTrue(report.is_consistent)
        self.assertLess(report.max_cycle_residual, 1e-9)

    def test_violated_long_range_chain_reports_four_edges(self):
        report = check_path_independence(violated_chain())
        self.assertEqual(report.status, GaugeReport.Status.VIOLATED)
        self.assertEqual(len(report.violating_cycle), 4)
        first, last = report.violating_cycle[0], report.violating_cycle[-1]
        self.assertEqual(first[0], last[1])

    def test_site_potentials_follow_metric(self):
        model = ssh3((0.5, 1.5, 0.8), (1.2, 0.4, 0.6), 3)
        report = check_path_independence(model)
        potentials = np.array([report.site_potentials[site] for site in range(1, 10)])
        metric = build_eta_i(model).diag
        # Squared scales are 1/η up to the root normalisation
        assert_allclose(potentials / potentials[0], metric[0] / metric)

    def test_root_and_hop_order_do_not_change_status(self):
        hops = (
            LongRangeHop(1, 1, 3, 0.1, 0.1 * (0.25 / 0.35) ** 3),
            LongRangeHop(1, 1, 2, 0.2, 0.2 * (0.25 / 0.35) ** 2 + 0.05),
        )
        for long_range in (hops, hops[::-1]):
            model = LatticeModel1D(1, 10, (0.35,), (0.25,), long_range=long_range)
            for root in (0, 4, 9):
                report = check_path_independence(model, root=root)
                self.assertEqual(report.status, GaugeReport.Status.VIOLATED)
        consistent = LatticeModel1D(1, 10, (0.35,), (0.25,), long_range=hops[:1])
        statuses = {check_path_independence(consistent, root=root).status for root in range(10)}
        self.assertEqual(statuses, {GaugeReport.Status.HERMITIZABLE})

    def test_zero_hop_is_degenerate(self):
        report = check_path_independence(ssh3((1, 0, 1), (1, 1, 1), 3))
        self.assertEqual(report.status, GaugeReport.Status.DEGENERATE)
        with self.assertRaises(DegenerateError):
            report.raise_for_status()

    def test_report_serialization(self):
        payload = json.loads(json.dumps(check_path_independence(violated_chain()).to_dict()))
        self.assertEqual(set(payload), {'status', 'max_cycle_residual', 'violating_cycle'})
        self.assertEqual(payload['status'], 'VIOLATED')
        self.assertTrue(all(len(edge) == 2 for edge in payload['violating_cycle']))


class ModulusGradingTest(unittest.TestCase):

    def test_doctest_values(self):
        grading = modulus_grading(build_real_space(hatano_nelson(0.5, 2, 3)))
        assert_allclose(grading, [0.5, 1, 2])

    def test_balances_every_bond_of_a_lattice(self):
        matrix = build_real_space_2d(diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 30, 40))
        grading = modulus_grading(matrix)
        graded = np.abs(matrix) * (grading[None, :] / grading[:, None])
        assert_allclose(graded, graded.T, rtol=1e-10, atol=1e-300)
        self.assertAlmostEqual(np.log(grading.max()) + np.log(grading.min()), 0)

    def test_long_range_chain_matches_gauge_modulus(self):
        model = satisfied_chain(20)
        grading = modulus_grading(build_real_space(model))
        metric = build_eta_i(model).diag
        # η is the inverse square of the gauge modulus
        ratios = grading ** 2 * metric
        assert_allclose(ratios / ratios[0], 1, rtol=1e-9)

    def test_one_way_hops_are_ignored(self):
        matrix = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert_allclose(modulus_grading(matrix), [1, 1])


class SolveGauge2DTest(unittest.TestCase):

    def setUp(self):
        self.model = diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, n_cols=6, n_rows=5)

    def test_axis_factors(self):
        grid = solve_gauge_2d(self.model)
        self.assertAlmostEqual(grid.r_x, np.sqrt(0.2 / 0.4))
        self.assertAlmostEqual(grid.r_y, np.sqrt(0.35 / 0.65))
        self.assertAlmostEqual(self.model.t1 / self.model.t2, (grid.r_x * grid.r_y) ** 2)

    def test_similarity_gives_hermitian_matrix(self):
        scale = solve_gauge_2d(self.model).diag
        matrix = build_real_space_2d(self.model) * np.outer(1 / scale, scale)
        assert_allclose(matrix, matrix.conj().T, atol=1e-12)

    def test_reciprocal_lattice_has_unit_factors(self):
        grid = solve_gauge_2d(LatticeModel2D(4, 3, 0.5, 0.5, 0.7, 0.7))
        assert_allclose(grid.factors, np.ones((3, 4)))

    def test_perturbed_diagonal_is_violated(self):
        model = LatticeModel2D(6, 5, 0.2, 0.4, 0.35, 0.65, t1=0.5, t2=self.model.t2.real + 0.05)
        with self.assertRaises(GaugeViolationError) as context:
            solve_gauge_2d(model)
        self.assertEqual(context.exception.report.status, GaugeReport.Status.VIOLATED)


class ReflectionSymmetryTest(unittest.TestCase):

    def test_hermitian_ssh_gives_pure_reflection(self):
        model = LatticeModel1D(2, 5, (0.6, 1.0), (0.6, 1.0))
        generator = reflection_symmetry_generator(model)
        assert_allclose(generator, np.fliplr(np.eye(10)))

    def test_nonreciprocal_ssh_commutes(self):
        model = LatticeModel1D(2, 6, (0.9, 1.3), (0.5, 0.7))
        generator = reflection_symmetry_generator(model)
        matrix = build_real_space(model)
        commutator = linalg.norm(generator @ matrix - matrix @ generator)
        self.assertLess(commutator, 1e-10 * linalg.norm(matrix))
        self.assertAlmostEqual(np.abs(generator).max(), 1.0)

    def test_long_skin_chain_commutes_without_metric_scaling(self):
        model = hatano_nelson(0.5, 2, 40)
        generator = reflection_symmetry_generator(model)
        matrix = build_real_space(model)
        entries = np.abs(np.fliplr(generator).diagonal())
        self.assertGreater(entries.max() / entries.min(), 1e20)
        commutator = linalg.norm(generator @ matrix - matrix @ generator)
        self.assertLessEqual(commutator, 1e-10 * linalg.norm(matrix))

    def test_trimer_with_mirror_hops_commutes(self):
        model = ssh3((0.5, 0.5, 0.8), (1.1, 1.1, 0.6), 5)
        generator = reflection_symmetry_generator(model)
        matrix = build_real_space(model)
        assert_allclose(generator @ matrix, matrix @ generator, atol=1e-10 * linalg.norm(generator))

    def test_broken_mirror_condition(self):
        with self.assertRaises(SymmetryAbsentError):
            reflection_symmetry_generator(ssh3((0.5, 0.9, 0.8), (1.1, 1.1, 0.6), 5))
