import csv
import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from core.exceptions import ValidationError
from lattice.models import LatticeModel1D
from lattice.presets import hatano_nelson, ssh3, third_neighbour_chain

from .cli import cli
from .commands import run
from .forms import clean_override, parse_overrides
from .models import ExperimentConfig
from .writers import format_value, round_significant, write_csv, write_json

DIAGONAL_LATTICE = {
    'Mx': 8,
    'Ny': 6,
    'tL': 0.4,
    'tR': 0.2,
    'tD': 0.65,
    'tU': 0.35,
    't1': 0.5,
    't2': 0.5 * (0.65 * 0.4) / (0.35 * 0.2),
}


def _amplitude(value):
    value = complex(value)
    return value.real if value.imag == 0 else [value.real, value.imag]


def model_document(model):
    document = {
        'M': model.n_sub,
        'N': model.n_cells,
        'tR': [_amplitude(value) for value in model.t_right],
        'tL': [_amplitude(value) for value in model.t_left],
        'boundary': str(model.boundary),
    }
    if model.long_range:
        document['long_range'] = [
            {'i': hop.i, 'j': hop.j, 'm': hop.m, 'tR': _amplitude(hop.t_right), 'tL': _amplitude(hop.t_left)}
            for hop in model.long_range
        ]
    return document


def read_csv(path):
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))


class ExperimentTestCase(unittest.TestCase):

    def setUp(self):
        self.workdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.workdir.cleanup)
        self.root = Path(self.workdir.name)
        self.out = self.root / 'out'
        self.runner = CliRunner()

    def write_model(self, document, name='model.json'):
        path = self.root / name
        path.write_text(json.dumps(document, indent=2), encoding='utf-8')
        return path

    def invoke(self, command, model_path=None, *overrides):
        args = [command, '--out', str(self.out)]
        if model_path is not None:
            args += ['--model', str(model_path)]
        for override in overrides:
            args += ['--set', override]
        return self.runner.invoke(cli, args)


class SpectrumCommandTest(ExperimentTestCase):

    def setUp(self):
        super().setUp()
        trimer = ssh3((2.025, -0.4, 0.7), (0.4, 0.9, 0.7), 40)
        self.model_path = self.write_model(model_document(trimer))

    def test_fig4_beyond_second_transition(self):
        result = self.invoke('spectrum', self.model_path, 't3=1.0')
        self.assertEqual(result.exit_code, 0, result.output)

        phase = json.loads((self.out / 'phase.json').read_text())
        self.assertEqual(phase['phase'], 'PT_BROKEN')
        self.assertEqual(phase['discrete_levels'], 4)

        rows = read_csv(self.out / 'spectrum.csv')
        self.assertEqual(len(rows), 120)
        self.assertEqual(sum(row['is_discrete'] == 'true' for row in rows), 4)

    def test_complex_amplitudes_keep_phase_schema(self):
        chain = ssh3((1.0, 0.5j, 0.8), (0.6, 1.2, 0.8 * np.exp(0.3j)), 6)
        result = self.invoke('spectrum', self.write_model(model_document(chain), 'complex.json'))
        self.assertEqual(result.exit_code, 0, result.output)

        phase = json.loads((self.out / 'phase.json').read_text())
        self.assertIsNone(phase['phase'])
        self.assertEqual((phase['pairs'], phase['real']), (0, 0))
        self.assertIsInstance(phase['discrete_levels'], int)

    def test_eigenstates_cover_every_site(self):
        self.invoke('spectrum', self.model_path, 'N=4')
        rows = read_csv(self.out / 'eigenstates.csv')
        self.assertEqual(len(rows), 12 * 12)
        self.assertEqual(rows[0]['state_index'], '1')
        self.assertEqual(rows[0]['site'], '1')

    def test_output_is_byte_identical_across_runs(self):
        self.invoke('spectrum', self.model_path, 'N=10')
        first = {name: (self.out / name).read_bytes() for name in ('spectrum.csv', 'phase.json')}
        self.invoke('spectrum', self.model_path, 'N=10')
        second = {name: (self.out / name).read_bytes() for name in ('spectrum.csv', 'phase.json')}
        self.assertEqual(first, second)

    def test_two_dimensional_model_is_rejected(self):
        result = self.invoke('spectrum', self.write_model(DIAGONAL_LATTICE, 'hn2d.json'))
        self.assertEqual(result.exit_code, 4)


class GbzCommandTest(ExperimentTestCase):

    def test_violated_chain_exits_zero_with_non_circular_curve(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 40, shift=0.014)
        result = self.invoke('gbz', self.write_model(model_document(model)))
        self.assertEqual(result.exit_code, 0, result.output)

        summary = json.loads((self.out / 'gbz_summary.json').read_text())
        self.assertFalse(summary['circular'])
        self.assertIsNone(summary['radius_theory'])

    def test_satisfied_chain_is_circular(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 40)
        result = self.invoke('gbz', self.write_model(model_document(model)))
        self.assertEqual(result.exit_code, 0, result.output)

        summary = json.loads((self.out / 'gbz_summary.json').read_text())
        self.assertTrue(summary['circular'])
        self.assertAlmostEqual(summary['radius_fit'], math.sqrt(1.4), places=4)
        for row in read_csv(self.out / 'gbz.csv'):
            self.assertAlmostEqual(float(row['modulus']), math.sqrt(1.4), places=5)

    def test_band_energies(self):
        model = ssh3((1, 1, 1), (0.4, 0.9, 0.5), 20)
        result = self.invoke('gbz', self.write_model(model_document(model)), 'energies=band', 'K=64')
        self.assertEqual(result.exit_code, 0, result.output)
        summary = json.loads((self.out / 'gbz_summary.json').read_text())
        self.assertEqual(summary['energies'], 'band')
        self.assertTrue(summary['circular'])


class EnvelopeCommandTest(ExperimentTestCase):

    def test_satisfied_chain_rates(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 40)
        result = self.invoke('envelope', self.write_model(model_document(model)))
        self.assertEqual(result.exit_code, 0, result.output)

        fit = json.loads((self.out / 'fit.json').read_text())
        expected = 0.5 * math.log(1.4)
        self.assertAlmostEqual(fit['theoretical_kappa'], expected, places=10)
        self.assertLess(abs(fit['median_kappa'] - expected), 0.02 * expected)

    def test_chain_too_short_for_fit(self):
        result = self.invoke('envelope', self.write_model(model_document(hatano_nelson(1, 2, 3))))
        self.assertEqual(result.exit_code, 4)


class ZakCommandTest(ExperimentTestCase):

    def test_topological_ssh3_total(self):
        model = ssh3((1, 1, 1), (0.3, 0.3, 1), 20)
        result = self.invoke('zak', self.write_model(model_document(model)))
        self.assertEqual(result.exit_code, 0, result.output)

        zak = json.loads((self.out / 'zak.json').read_text())
        self.assertEqual(zak['total'], 4)
        self.assertTrue(zak['left_right_agree'])


class PhaseDiagramCommandTest(ExperimentTestCase):

    def test_small_grid(self):
        result = self.invoke(
            'phase-diagram', None, 'resolution=3', 'N=10', 'K=64', 'x_min=-1', 'x_max=1'
        )
        self.assertEqual(result.exit_code, 0, result.output)

        rows = read_csv(self.out / 'phase_diagram.csv')
        self.assertEqual(len(rows), 9)
        axis = [row for row in rows if float(row['x']) == 0.0 or float(row['y']) == 0.0]
        self.assertEqual(len(axis), 5)
        for row in axis:
            self.assertEqual(row['pt_phase'], 'DEGENERATE')
            self.assertEqual(row['edge_count'], '')

    def test_zero_intercell_hop_is_rejected(self):
        result = self.invoke('phase-diagram', None, 't3=0')
        self.assertEqual(result.exit_code, 4)


class CheckGaugeCommandTest(ExperimentTestCase):

    def test_zero_hop_is_degenerate(self):
        result = self.invoke('check-gauge', self.write_model(model_document(hatano_nelson(0, 1, 5))))
        self.assertEqual(result.exit_code, 3)
        report = json.loads((self.out / 'gauge_report.json').read_text())
        self.assertEqual(report['status'], 'DEGENERATE')

    def test_violated_chain(self):
        model = third_neighbour_chain(0.25, 0.35, 0.1, 8, shift=0.014)
        result = self.invoke('check-gauge', self.write_model(model_document(model)))
        self.assertEqual(result.exit_code, 2)
        report = json.loads((self.out / 'gauge_report.json').read_text())
        self.assertEqual(report['status'], 'VIOLATED')
        self.assertEqual(len(report['violating_cycle']), 4)

    def test_two_dimensional_lattice(self):
        result = self.invoke('check-gauge', self.write_model(DIAGONAL_LATTICE))
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((self.out / 'gauge_report.json').read_text())
        self.assertEqual(report['status'], 'HERMITIZABLE')


class Hn2dCommandTest(ExperimentTestCase):

    def test_density_map_and_rates(self):
        result = self.invoke('hn2d', self.write_model(DIAGONAL_LATTICE))
        self.assertEqual(result.exit_code, 0, result.output)

        rows = read_csv(self.out / 'density_map.csv')
        self.assertEqual(len(rows), 48)
        self.assertAlmostEqual(sum(float(row['density']) for row in rows), 1.0, places=9)

        summary = json.loads((self.out / 'envelope2d.json').read_text())
        self.assertLess(summary['max_imag_energy'], 1e-8)
        self.assertAlmostEqual(summary['theoretical_kappa_x'], -0.5 * math.log(2), places=10)
        self.assertIsNone(summary['radius_x'])

    def test_full_size_lattice(self):
        result = self.invoke('hn2d', self.write_model(dict(DIAGONAL_LATTICE, Mx=30, Ny=40)))
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(read_csv(self.out / 'density_map.csv')), 1200)
        summary = json.loads((self.out / 'envelope2d.json').read_text())
        self.assertLess(summary['max_imag_energy'], 1e-8)

    def test_separable_lattice_reports_radii(self):
        document = dict(DIAGONAL_LATTICE, t1=0.0, t2=0.0)
        self.invoke('hn2d', self.write_model(document))
        summary = json.loads((self.out / 'envelope2d.json').read_text())
        self.assertAlmostEqual(summary['radius_x'], math.sqrt(0.5), places=9)
        self.assertAlmostEqual(summary['radius_y'], math.sqrt(0.35 / 0.65), places=9)

    def test_one_dimensional_model_is_rejected(self):
        result = self.invoke('hn2d', self.write_model(model_document(hatano_nelson(1, 2, 6))))
        self.assertEqual(result.exit_code, 4)


class CommandLineErrorsTest(ExperimentTestCase):

    def test_bad_override_exits_with_validation_code(self):
        path = self.write_model(model_document(hatano_nelson(1, 2, 6)))
        self.assertEqual(self.invoke('spectrum', path, 'K=abc').exit_code, 4)
        self.assertEqual(self.invoke('spectrum', path, 'bogus=1').exit_code, 4)
        self.assertEqual(self.invoke('spectrum', path, 'K').exit_code, 4)

    def test_missing_model_option(self):
        self.assertEqual(self.invoke('spectrum').exit_code, 4)

    def test_unreadable_model_file(self):
        self.assertEqual(self.invoke('spectrum', self.root / 'missing.json').exit_code, 4)

    def test_schema_error(self):
        path = self.write_model({'M': 2, 'N': 4, 'tR': [1], 'tL': [1, 1]})
        self.assertEqual(self.invoke('spectrum', path).exit_code, 4)

    def test_usage_error_maps_to_validation_code(self):
        from nonrecip import main

        with self.assertRaises(SystemExit) as context:
            main(['spectrum', '--no-such-option'])
        self.assertEqual(context.exception.code, 4)


class RunTest(ExperimentTestCase):

    def test_run_returns_exit_code(self):
        path = self.write_model(model_document(hatano_nelson(0, 1, 5)))
        config = ExperimentConfig(command='check-gauge', model_path=path, output_dir=self.out)
        self.assertEqual(run(config), 3)

    def test_model_required_except_for_phase_diagram(self):
        with self.assertRaises(ValidationError):
            ExperimentConfig(command='zak')
        ExperimentConfig(command='phase-diagram')

    def test_intercell_override(self):
        path = self.write_model(model_document(ssh3((1, 1, 1), (1, 1, 1), 4, LatticeModel1D.Boundary.PBC)))
        config = ExperimentConfig(
            command='spectrum', model_path=path, output_dir=self.out, overrides={'t3': 0.5}
        )
        self.assertEqual(run(config), 0)
        phase = json.loads((self.out / 'phase.json').read_text())
        self.assertEqual(phase['boundary'], 'pbc')
        self.assertEqual(phase['discrete_levels'], 0)


class OverridesTest(unittest.TestCase):

    def test_typed_values(self):
        self.assertEqual(parse_overrides(['K=1024', 't3=0.75']), {'K': 1024, 't3': 0.75})

    def test_positive_keys(self):
        with self.assertRaises(ValidationError):
            clean_override('resolution', '0')

    def test_energy_source(self):
        self.assertEqual(clean_override('energies', 'band'), 'band')
        with self.assertRaises(ValidationError):
            clean_override('energies', 'pbc')


class WritersTest(unittest.TestCase):

    def test_round_significant(self):
        self.assertEqual(round_significant(0.1 + 0.2), 0.3)
        self.assertEqual(repr(round_significant(-0.0)), '0.0')

    def test_format_value(self):
        self.assertEqual(format_value(True), 'true')
        self.assertEqual(format_value(np.int64(3)), '3')
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(1 / 3), '0.333333333333')

    def test_json_maps_nan_to_null(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_json(Path(directory) / 'out.json', {'b': float('nan'), 'a': np.array([1.0, 2.0])})
            self.assertEqual(json.loads(path.read_text()), {'a': [1.0, 2.0], 'b': None})
            self.assertTrue(path.read_text().startswith('{\n  "a"'))

    def test_csv_uses_unix_newlines(self):
        with tempfile.TemporaryDirectory() as directory:
            path = write_csv(Path(directory) / 'out.csv', ('x', 'y'), [(1, 0.5), (2, float('nan'))])
            self.assertEqual(path.read_bytes(), b'x,y\n1,0.5\n2,nan\n')
