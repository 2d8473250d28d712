import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from core.exceptions import ValidationError

from .forms import LatticeModelForm, parse_complex, validate_model
from .hamiltonians import bloch_eval, build_real_space, build_real_space_2d, hopping_blocks
from .models import LatticeModel1D, LatticeModel2D, LongRangeHop
from .presets import diagonal_hn2d, hatano_nelson, random_nn_model, ssh3, third_neighbour_chain


def spectrum_distance(first, second):
    distances = np.abs(np.subtract.outer(first, second))
    rows, columns = linear_sum_assignment(distances)
    return distances[rows, columns].max()


class LatticeModelTest(unittest.TestCase):

    def test_amplitudes_stored_as_complex(self):
        model = hatano_nelson(0.5, 2, 3)
        self.assertIsInstance(model.t_right[0], complex)
        self.assertTrue(model.is_real)

    def test_complex_amplitude_clears_real_flag(self):
        model = ssh3((1, 1j, 1), (1, 1, 1), 4)
        self.assertFalse(model.is_real)

    def test_amplitude_count_must_match_sublattices(self):
        with self.assertRaises(ValidationError) as context:
            LatticeModel1D(n_sub=3, n_cells=2, t_right=(1, 1), t_left=(1, 1, 1))
        self.assertIn('tR', context.exception.error_dict)

    def test_long_range_sublattice_out_of_range(self):
        with self.assertRaises(ValidationError):
            LatticeModel1D(
                n_sub=2, n_cells=4, t_right=(1, 1), t_left=(1, 1),
                long_range=(LongRangeHop(1, 3, 1, 0.1, 0.1),),
            )

    def test_long_range_offset_must_be_positive(self):
        with self.assertRaises(ValidationError):
            LatticeModel1D(
                n_sub=1, n_cells=4, t_right=(1,), t_left=(1,),
                long_range=(LongRangeHop(1, 1, 0, 0.1, 0.1),),
            )

    def test_two_dimensional_lattice_needs_two_sites_per_axis(self):
        with self.assertRaises(ValidationError):
            LatticeModel2D(1, 4, 1, 1, 1, 1)


class BuildRealSpaceTest(unittest.TestCase):

    def test_hatano_nelson_is_tridiagonal(self):
        matrix = build_real_space(hatano_nelson(0.5, 2, 3))
        expected = np.array([
            [0, 0.5, 0],
            [2, 0, 0.5],
            [0, 2, 0],
        ])
        assert_allclose(matrix, expected)

    def test_empty_long_range_matches_nearest_neighbour_assembly(self):
        model = ssh3((1.2, 0.4, 0.7), (0.3, 0.9, 0.7), 5)
        with_empty = LatticeModel1D(3, 5, model.t_right, model.t_left, long_range=())
        assert_allclose(build_real_space(with_empty), build_real_space(model))

    def test_ssh3_entries_match_hand_assembly(self):
        t_left = (2.025, -0.4, 0.7)
        t_right = (0.4, 0.9, 0.7)
        matrix = build_real_space(ssh3(t_left, t_right, 2))

        expected = np.zeros((6, 6))
        entries = [
            (1, 0, 0.4), (0, 1, 2.025),
            (2, 1, 0.9), (1, 2, -0.4),
            (3, 2, 0.7), (2, 3, 0.7),
            (4, 3, 0.4), (3, 4, 2.025),
            (5, 4, 0.9), (4, 5, -0.4),
        ]
        for row, column, value in entries:
            expected[row, column] = value
        assert_allclose(matrix, expected)

    def test_periodic_boundary_adds_wrap_terms(self):
        model = hatano_nelson(0.5, 2, 4, boundary=LatticeModel1D.Boundary.PBC)
        matrix = build_real_space(model)
        self.assertEqual(matrix[0, 3], 2)
        self.assertEqual(matrix[3, 0], 0.5)

    def test_long_range_hops_are_superposed(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 6)
        matrix = build_real_space(model)
        self.assertAlmostEqual(matrix[3, 0], 0.1)
        self.assertAlmostEqual(matrix[0, 3], model.long_range[0].t_left)
        self.assertAlmostEqual(matrix[1, 0], 0.35)

    def test_reciprocal_model_is_hermitian(self):
        model = LatticeModel1D(
            n_sub=2, n_cells=6, t_right=(0.8, 1.3), t_left=(0.8, 1.3),
            long_range=(LongRangeHop(1, 2, 2, 0.2, 0.2),),
        )
        matrix = build_real_space(model)
        assert_allclose(matrix, matrix.conj().T)

    def test_transposed_model_gives_transposed_matrix(self):
        model = LatticeModel1D(
            n_sub=3, n_cells=4, t_right=(0.4, 0.9, 0.7), t_left=(2.0, -0.4, 0.3),
            long_range=(LongRangeHop(2, 1, 1, 0.15, -0.05),),
        )
        assert_allclose(build_real_space(model.transposed()), build_real_space(model).T)


class HoppingBlocksTest(unittest.TestCase):

    def test_hatano_nelson_blocks(self):
        blocks = hopping_blocks(hatano_nelson(0.5, 2, 10))
        self.assertEqual(sorted(blocks.blocks), [-1, 1])
        self.assertEqual(blocks.p, 1)
        self.assertEqual(blocks.block(1)[0, 0], 2)
        self.assertEqual(blocks.block(-1)[0, 0], 0.5)

    def test_intercell_entries(self):
        blocks = hopping_blocks(ssh3((1, 2, 3), (4, 5, 6), 2))
        self.assertEqual(blocks.block(1)[0, 2], 6)
        self.assertEqual(blocks.block(-1)[2, 0], 3)
        self.assertEqual(blocks.block(0)[1, 0], 4)
        self.assertEqual(blocks.block(0)[0, 1], 1)

    def test_reciprocal_blocks_are_hermitian_partners(self):
        blocks = hopping_blocks(ssh3((0.5, 0.8, 1.1), (0.5, 0.8, 1.1), 3))
        for offset in blocks.blocks:
            assert_allclose(blocks.block(offset), blocks.block(-offset).conj().T)

    def test_third_neighbour_chain_blocks(self):
        blocks = hopping_blocks(third_neighbour_chain(0.25, 0.35, 0.1, 40))
        self.assertEqual(sorted(blocks.blocks), [-3, -1, 1, 3])
        self.assertEqual(blocks.p, 3)
        self.assertTrue(blocks.is_balanced)


class BlochEvalTest(unittest.TestCase):

    def test_hatano_nelson_at_unity(self):
        matrix = bloch_eval(hopping_blocks(hatano_nelson(0.5, 2, 3)), 1.0)
        assert_allclose(matrix, [[2.5]])

    def test_reciprocal_model_is_hermitian_on_unit_circle(self):
        blocks = hopping_blocks(ssh3((0.5, 0.8, 1.1), (0.5, 0.8, 1.1), 3))
        matrix = bloch_eval(blocks, np.exp(0.7j))
        assert_allclose(matrix, matrix.conj().T, atol=1e-14)

    def test_beta_zero_is_rejected(self):
        with self.assertRaises(ValidationError):
            bloch_eval(hopping_blocks(hatano_nelson(0.5, 2, 3)), 0)

    def test_periodic_spectrum_is_union_of_bloch_spectra(self):
        rng = np.random.default_rng(7)
        for n_sub in (1, 2, 3):
            for n_cells in (3, 5, 8):
                base = random_nn_model(rng, n_sub, n_cells)
                model = LatticeModel1D(
                    n_sub=n_sub,
                    n_cells=n_cells,
                    t_right=base.t_right,
                    t_left=base.t_left,
                    long_range=(LongRangeHop(1, n_sub, 2, 0.3, -0.2),),
                    boundary=LatticeModel1D.Boundary.PBC,
                )
                real_space = linalg.eigvals(build_real_space(model))
                blocks = hopping_blocks(model)
                bloch = np.concatenate([
                    linalg.eigvals(bloch_eval(blocks, np.exp(2j * np.pi * j / n_cells)))
                    for j in range(n_cells)
                ])
                self.assertLess(spectrum_distance(real_space, bloch), 1e-8)


class BuildRealSpace2DTest(unittest.TestCase):

    def test_two_by_two_has_eight_hops(self):
        matrix = build_real_space_2d(LatticeModel2D(2, 2, 0.2, 0.4, 0.35, 0.65))
        self.assertEqual(np.count_nonzero(matrix), 8)
        self.assertEqual(matrix[1, 0], 0.2)
        self.assertEqual(matrix[2, 0], 0.35)

    def test_diagonal_hops(self):
        model = LatticeModel2D(3, 3, 1, 1, 1, 1, t1=0.5, t2=0.25)
        matrix = build_real_space_2d(model)
        self.assertEqual(matrix[model.site(2, 2), model.site(1, 1)], 0.5)
        self.assertEqual(matrix[model.site(1, 1), model.site(2, 2)], 0.25)

    def test_gauge_consistent_lattice_has_real_spectrum(self):
        model = diagonal_hn2d(0.4, 0.2, 0.65, 0.35, 0.5, 6, 8)
        eigenvalues = linalg.eigvals(build_real_space_2d(model).real)
        scale = max(1.0, np.abs(eigenvalues).max())
        self.assertLess(np.abs(eigenvalues.imag).max(), 1e-9 * scale)

    def test_reciprocal_lattice_is_hermitian(self):
        matrix = build_real_space_2d(LatticeModel2D(4, 3, 0.7, 0.7, 1.1, 1.1))
        assert_allclose(matrix, matrix.conj().T)


class ModelFormTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text):
        path = Path(self.tmp.name) / 'model.json'
        path.write_text(text, encoding='utf-8')
        return path

    def test_valid_hatano_nelson_document(self):
        path = self.write(json.dumps({'M': 1, 'N': 3, 'tR': [2], 'tL': [0.5]}))
        model = validate_model(path)
        self.assertEqual(model.n_cells, 3)
        self.assertEqual(model.t_right, (2 + 0j,))
        self.assertEqual(model.boundary, LatticeModel1D.Boundary.OBC)

    def test_complex_amplitudes(self):
        self.assertEqual(parse_complex([0.3, -0.1]), complex(0.3, -0.1))
        with self.assertRaises(ValueError):
            parse_complex([1, 2, 3])
        with self.assertRaises(ValueError):
            parse_complex(True)

    def test_amplitude_count_error_names_field_and_line(self):
        text = '{\n  "M": 2,\n  "N": 4,\n  "tR": [1, 2, 3],\n  "tL": [1, 1]\n}\n'
        with self.assertRaises(ValidationError) as context:
            validate_model(self.write(text))
        self.assertIn('tR', context.exception.error_dict)
        self.assertIn('line 4', context.exception.error_dict['tR'][0])

    def test_self_hop_is_rejected(self):
        document = {
            'M': 2, 'N': 4, 'tR': [1, 1], 'tL': [1, 1],
            'long_range': [{'i': 1, 'j': 1, 'm': 0, 'tR': 0.1, 'tL': 0.1}],
        }
        form = LatticeModelForm(document, json.dumps(document))
        self.assertFalse(form.is_valid())
        self.assertIn('self-hop', form.errors['long_range[0]'][0])

    def test_invalid_json_reports_line(self):
        with self.assertRaises(ValidationError) as context:
            validate_model(self.write('{\n  "M": 1,\n  "N": \n}'))
        self.assertIn('line', context.exception.messages[0])

    def test_unknown_and_missing_fields(self):
        form = LatticeModelForm({'M': 1, 'tR': [1], 'tL': [1], 'colour': 'red'})
        self.assertFalse(form.is_valid())
        self.assertIn('N', form.errors)
        self.assertIn('colour', form.errors)

    def test_two_dimensional_document(self):
        document = {'Mx': 3, 'Ny': 4, 'tR': 0.2, 'tL': 0.4, 'tU': 0.35, 'tD': 0.65, 't1': 0.5}
        model = validate_model(self.write(json.dumps(document)))
        self.assertIsInstance(model, LatticeModel2D)
        self.assertEqual(model.t2, 0)
        self.assertEqual(model.n_rows, 4)


if __name__ == '__main__':
    unittest.main()
