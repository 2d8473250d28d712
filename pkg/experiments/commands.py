'''
Experiment runners behind the command line.

Each runner reads an ExperimentConfig, writes its data files into
config.output_dir and returns the process exit code. run() maps project
errors to their exit codes.
'''

import logging
from dataclasses import replace

import numpy as np

from core.exceptions import (
    DegenerateError,
    GaugeViolationError,
    NonrecipError,
    NotSeparableError,
    ValidationError,
)
from gauge.models import GaugeReport
from gauge.paths import check_path_independence
from gbz.curves import (
    beta_pairing_check,
    circular_band_sweep,
    gbz_2d_separable,
    gbz_points,
    reference_energies,
)
from lattice.forms import validate_model
from lattice.hamiltonians import build_real_space, build_real_space_2d
from lattice.models import LatticeModel1D, LatticeModel2D
from spectral.eigen import biorthogonal_system, eig_full
from spectral.envelopes import localization_lengths, localization_lengths_2d
from spectral.levels import discrete_mask
from spectral.phases import classify_spectrum
from topology.diagrams import phase_diagram as compute_phase_diagram
from topology.zak import compute_ns_zak

from .models import ExperimentConfig
from .writers import write_csv, write_json

logger = logging.getLogger(__name__)

Command = ExperimentConfig.Command


def _load_model(config):
    model = validate_model(config.model_path)
    if isinstance(model, LatticeModel2D):
        return model
    if 'N' in config.overrides:
        model = replace(model, n_cells=config.get('N'))
    if 't3' in config.overrides:
        # t3 is the intercell bond, symmetric in both directions
        t3 = complex(config.get('t3'))
        model = replace(
            model,
            t_right=model.t_right[:-1] + (t3,),
            t_left=model.t_left[:-1] + (t3,),
        )
    return model


def _load_1d(config):
    model = _load_model(config)
    if not isinstance(model, LatticeModel1D):
        raise ValidationError(f'{config.command} expects a 1D model', field='model')
    return model


def _load_2d(config):
    model = _load_model(config)
    if not isinstance(model, LatticeModel2D):
        raise ValidationError(f'{config.command} expects a 2D model (Mx, Ny)', field='model')
    return model


def _open(model):
    return model.with_boundary(LatticeModel1D.Boundary.OBC)


def _discrete(model, eigenvalues, config):
    '''Discrete-level mask against the circular band sweep; all False without one.'''
    if model.boundary != LatticeModel1D.Boundary.OBC:
        return np.zeros(len(eigenvalues), dtype=bool)
    K = config.get('K', max(8 * model.n_cells, 512))
    try:
        sweep = circular_band_sweep(model, K=K, ep_threshold=config.get('ep_threshold'))
    except (GaugeViolationError, DegenerateError) as error:
        logger.warning('Discrete-level detection skipped: %s', error)
        return np.zeros(len(eigenvalues), dtype=bool)
    return discrete_mask(eigenvalues, sweep.energies, config.get('gap_threshold'))


def spectrum(config):
    model = _load_1d(config)
    pairs = eig_full(build_real_space(model))
    eigenvalues = pairs.eigenvalues
    mask = _discrete(model, eigenvalues, config)

    kappa = np.full(len(eigenvalues), np.nan)
    if model.boundary == LatticeModel1D.Boundary.OBC:
        try:
            kappa = localization_lengths(pairs, model).per_state_kappa
        except ValidationError as error:
            logger.warning('Envelope fit skipped: %s', error)

    write_csv(
        config.output_dir / 'spectrum.csv',
        ('index', 're_E', 'im_E', 'kappa', 'is_discrete'),
        (
            (index + 1, energy.real, energy.imag, kappa[index], mask[index])
            for index, energy in enumerate(eigenvalues)
        ),
    )

    if model.is_real:
        summary = classify_spectrum(eigenvalues, tol=config.get('conjugate_tol')).to_dict()
    else:
        logger.info('Complex amplitudes: conjugate pairing is not required')
        summary = {'phase': None, 'pairs': 0, 'real': 0}
    summary.update(
        discrete_levels=int(mask.sum()),
        sites=model.size,
        boundary=str(model.boundary),
        condition_estimate=pairs.condition_estimate,
    )
    write_json(config.output_dir / 'phase.json', summary)

    rows = (
        (state + 1, site + 1, value.real, value.imag)
        for state in range(pairs.right.shape[1])
        for site, value in enumerate(pairs.right[:, state])
    )
    write_csv(config.output_dir / 'eigenstates.csv', ('state_index', 'site', 're_psi', 'im_psi'), rows)
    return 0


def gbz(config):
    model = _open(_load_1d(config))
    if config.get('energies', 'obc') == 'band':
        energies = circular_band_sweep(
            model, K=config.get('K'), ep_threshold=config.get('ep_threshold')
        ).samples()
    else:
        energies = reference_energies(model, K=config.get('K'), gap_threshold=config.get('gap_threshold'))

    curve = gbz_points(model, energies)
    write_csv(
        config.output_dir / 'gbz.csv',
        ('re_E', 'im_E', 're_beta', 'im_beta', 'modulus'),
        (
            (energy.real, energy.imag, beta.real, beta.imag, abs(beta))
            for energy, beta in zip(curve.energies, curve.betas)
        ),
    )
    summary = curve.to_dict(config.get('circular_tol'))
    summary['pairing'] = beta_pairing_check(model, energies).passed
    summary['energies'] = config.get('energies', 'obc')
    write_json(config.output_dir / 'gbz_summary.json', summary)
    if not summary['circular']:
        logger.info('GBZ deviates from a circle by %.3g', curve.max_radial_deviation)
    return 0


def envelope(config):
    model = _open(_load_1d(config))
    pairs = eig_full(build_real_space(model))
    mask = _discrete(model, pairs.eigenvalues, config)
    indices = np.flatnonzero(~mask)
    fit = localization_lengths(pairs, model, indices)

    write_csv(
        config.output_dir / 'envelopes.csv',
        ('state_index', 're_E', 'im_E', 'kappa', 'r_squared'),
        (
            (
                index + 1,
                pairs.eigenvalues[index].real,
                pairs.eigenvalues[index].imag,
                kappa,
                quality,
            )
            for index, kappa, quality in zip(fit.indices, fit.per_state_kappa, fit.r_squared)
        ),
    )
    summary = fit.to_dict()
    summary['discrete_levels'] = int(mask.sum())
    write_json(config.output_dir / 'fit.json', summary)
    return 0


def zak(config):
    model = _open(_load_1d(config))
    result = compute_ns_zak(
        model,
        K=config.get('K'),
        sublattice=config.get('sublattice', 1),
        ep_threshold=config.get('ep_threshold'),
    )
    write_json(config.output_dir / 'zak.json', result.to_dict())
    if not result.left_right_agree:
        logger.warning('Left and right windings disagree: %s', result.left_windings)
    return 0


def phase_diagram(config):
    grid = compute_phase_diagram(
        config.get('t3', 1.0),
        x_range=(config.get('x_min', -2.0), config.get('x_max', 2.0)),
        y_range=(config.get('y_min', -2.0), config.get('y_max', 2.0)),
        resolution=config.get('resolution', 21),
        n_cells=config.get('N', 40),
        K=config.get('K'),
    )

    def edge_count(cell):
        if cell.is_transition:
            return '|'.join(str(count) for count in cell.adjacent_counts)
        return cell.edge_count

    write_csv(
        config.output_dir / 'phase_diagram.csv',
        ('x', 'y', 'edge_count', 'pt_phase'),
        ((cell.x, cell.y, edge_count(cell), cell.pt_phase) for cell in grid.cells),
    )
    return 0


def check_gauge(config):
    model = _load_model(config)
    report = check_path_independence(model, tol=config.get('cycle_tol'))
    write_json(config.output_dir / 'gauge_report.json', report.to_dict())
    if report.status == GaugeReport.Status.VIOLATED:
        return GaugeViolationError.exit_code
    if report.status == GaugeReport.Status.DEGENERATE:
        return DegenerateError.exit_code
    return 0


def hn2d(config):
    model = _load_2d(config)
    system = biorthogonal_system(build_real_space_2d(model), config.get('ep_threshold'))

    density = (np.abs(system.right) ** 2).sum(axis=1)
    density /= density.sum()
    write_csv(
        config.output_dir / 'density_map.csv',
        ('x', 'y', 'density'),
        (
            (column, row, density[model.site(column, row)])
            for row in range(1, model.n_rows + 1)
            for column in range(1, model.n_cols + 1)
        ),
    )

    summary = localization_lengths_2d(system, model).to_dict()
    summary['max_imag_energy'] = float(np.abs(system.eigenvalues.imag).max())
    try:
        separable = gbz_2d_separable(model, K=config.get('K'))
        summary['radius_x'], summary['radius_y'] = separable.radius_x, separable.radius_y
    except NotSeparableError:
        summary['radius_x'] = summary['radius_y'] = None
    write_json(config.output_dir / 'envelope2d.json', summary)
    return 0


RUNNERS = {
    Command.SPECTRUM: spectrum,
    Command.GBZ: gbz,
    Command.ENVELOPE: envelope,
    Command.ZAK: zak,
    Command.PHASE_DIAGRAM: phase_diagram,
    Command.CHECK_GAUGE: check_gauge,
    Command.HN2D: hn2d,
}


def run(config):
    '''
    Run one experiment and translate project errors into exit codes.

    Args:
        config: ExperimentConfig

    Returns:
        int: 0 on success, otherwise the exit code of the raised error
    '''
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        logger.error('Cannot create %s: %s', config.output_dir, error.strerror)
        return ValidationError.exit_code

    logger.info('Running %s', config.command)
    try:
        return RUNNERS[config.command](config)
    except ValidationError as error:
        for message in error.messages:
            logger.error(message)
        return error.exit_code
    except NonrecipError as error:
        logger.error('%s: %s', type(error).__name__, error)
        return error.exit_code
