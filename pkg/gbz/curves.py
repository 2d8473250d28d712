'''
Generalized Brillouin zones, their circle fits and the bands living on them.
'''

import logging

import numpy as np
from scipy.optimize import linear_sum_assignment

from core import settings
from core.exceptions import (
    DegenerateError,
    GaugeViolationError,
    NotSeparableError,
    ValidationError,
)
from gauge.paths import check_path_independence
from lattice.hamiltonians import bloch_eval, build_real_space, hopping_blocks
from lattice.models import LatticeModel1D
from lattice.presets import hatano_nelson
from spectral.eigen import eig_full, match_by_overlap
from spectral.levels import discrete_mask

from .models import BandSweep, GbzCurve, PairingReport, SeparableGbz
from .polynomials import beta_roots, char_poly, middle_roots

logger = logging.getLogger(__name__)


def theoretical_radius(model):
    '''
    Closed-form GBZ radius √|Π t_R / Π t_L| over nearest-neighbour hops.

    Raises:
        DegenerateError: If a hop is zero
        GaugeViolationError: If long-range hops break path independence; the
            GBZ is then not a circle and must be computed with gbz_points
    '''
    if model.has_zero_hop:
        raise DegenerateError('a hop amplitude is zero; the GBZ radius is 0 or infinite')
    if model.long_range:
        report = check_path_independence(model)
        if report.status == report.Status.VIOLATED:
            raise GaugeViolationError(
                'hopping ratios are path dependent; no closed-form radius, use gbz_points',
                report=report,
            )
        report.raise_for_status()
    products = abs(np.prod(model.t_right) / np.prod(model.t_left))
    return float(np.sqrt(products))


def _squared_ratio(model):
    return complex(np.prod(model.t_right) / np.prod(model.t_left))


def gbz_points_from_blocks(bloch_matrix, energies, theoretical=None):
    '''
    Middle-modulus roots of det(H(beta) - E) for each energy.

    Args:
        bloch_matrix: BlochMatrix of the chain
        energies: Energies to solve at
        theoretical: Closed-form radius to report alongside the fit

    Returns:
        GbzCurve

    Raises:
        ValidationError: If energies is empty
    '''
    energies = np.asarray(energies, dtype=complex).ravel()
    if not len(energies):
        raise ValidationError('at least one energy is needed', field='energies')
    if not bloch_matrix.is_balanced:
        logger.warning(
            'Unbalanced hopping range (forward %d, backward %d); middle ranks follow ceil(D/2)',
            bloch_matrix.p_forward, bloch_matrix.p_backward,
        )

    points = []
    for energy in energies:
        for beta in middle_roots(char_poly(bloch_matrix, energy)):
            points.append((complex(energy), complex(beta)))

    moduli = np.abs([beta for _, beta in points])
    radius = float(np.median(moduli))
    deviation = float(np.abs(moduli - radius).max())
    logger.info('GBZ fitted over %d energies: radius %.6g, deviation %.3g', len(energies), radius, deviation)
    return GbzCurve(
        points=points,
        radius=radius,
        max_radial_deviation=deviation,
        theoretical_radius=theoretical,
        balanced=bloch_matrix.is_balanced,
    )


def gbz_points(model, energies):
    '''
    GBZ of a 1D chain traced by the middle pair of roots at each energy.

    Args:
        model: LatticeModel1D
        energies: Continuum energies, typically reference_energies(model)

    Returns:
        GbzCurve: theoretical_radius is None when path independence fails

    Example:
        >>> model = third_neighbour_chain(0.25, 0.35, 0.1, 40)
        >>> round(gbz_points(model, reference_energies(model)).radius, 4)
        1.1832
    '''
    try:
        theoretical = theoretical_radius(model)
    except GaugeViolationError:
        logger.info('Path independence violated; GBZ is computed numerically only')
        theoretical = None
    return gbz_points_from_blocks(hopping_blocks(model), energies, theoretical)


def beta_pairing_check(model, energies, tol=None):
    '''
    Check that the roots at every energy are invariant under beta -> r_M²/beta.

    r_M² is the signed ratio Π t_R / Π t_L of the nearest-neighbour hops.
    Roots are paired with their images by minimum-cost assignment and the
    residual is relative to max(1, |beta|).

    Returns:
        PairingReport
    '''
    tol = settings.PAIRING_TOL if tol is None else tol
    squared = _squared_ratio(model)
    bloch_matrix = hopping_blocks(model)

    worst = 0.0
    failed = []
    for energy in np.asarray(energies, dtype=complex).ravel():
        roots = beta_roots(char_poly(bloch_matrix, energy))
        images = squared / roots
        distances = np.abs(np.subtract.outer(roots, images))
        distances /= np.maximum(1.0, np.abs(roots))[:, None]
        rows, columns = linear_sum_assignment(distances)
        residual = float(distances[rows, columns].max())
        worst = max(worst, residual)
        if residual > tol:
            failed.append(complex(energy))

    if failed:
        logger.info('Root pairing fails at %d energies (residual %.3g)', len(failed), worst)
    return PairingReport(passed=not failed, max_residual=worst, failed_energies=tuple(failed))


def circular_band_sweep(model, K=None, radius=None, ep_threshold=None):
    '''
    Continuum bands on the circular GBZ beta = r·e^(ik), k = 2πj/K.

    Bands start ordered by (Re E, Im E) at k = 0 and are continued by
    maximal eigenvector overlap. Samples too close to an exceptional point
    are skipped and left as NaN.

    Args:
        model: LatticeModel1D
        K: Number of samples (settings.ZAK_SAMPLES by default)
        radius: Circle radius, theoretical_radius(model) by default
        ep_threshold: Smallest accepted condition estimate

    Returns:
        BandSweep
    '''
    K = settings.ZAK_SAMPLES if K is None else K
    ep_threshold = settings.EP_THRESHOLD if ep_threshold is None else ep_threshold
    if K < 1:
        raise ValidationError('must be a positive integer', field='K')
    radius = theoretical_radius(model) if radius is None else float(radius)
    bloch_matrix = hopping_blocks(model)

    k_values = 2 * np.pi * np.arange(K) / K
    energies = np.full((model.n_sub, K), np.nan, dtype=complex)
    skipped = []
    previous = None
    for index, k in enumerate(k_values):
        pairs = eig_full(bloch_eval(bloch_matrix, radius * np.exp(1j * k)))
        if pairs.condition_estimate < ep_threshold:
            logger.warning('Skipping k = %.6g: eigenvectors nearly coalesce', k)
            skipped.append(index)
            continue
        if previous is None:
            order = np.arange(model.n_sub)
        else:
            order, _ = match_by_overlap(previous, pairs.right)
        energies[:, index] = pairs.eigenvalues[order]
        previous = pairs.right[:, order]

    return BandSweep(radius=radius, k_values=k_values, energies=energies, skipped=tuple(skipped))


def reference_energies(model, K=None, gap_threshold=None):
    '''
    Open-boundary eigenvalues with the discrete levels removed.

    Discrete levels are found against the circular band sweep; when the GBZ
    has no closed-form radius every eigenvalue is kept.
    '''
    obc = model.with_boundary(LatticeModel1D.Boundary.OBC)
    eigenvalues = eig_full(build_real_space(obc)).eigenvalues
    K = max(8 * model.n_cells, settings.ZAK_SAMPLES) if K is None else K
    try:
        sweep = circular_band_sweep(obc, K=K)
    except GaugeViolationError:
        logger.warning('GBZ is not circular; discrete-level detection skipped')
        return eigenvalues
    mask = discrete_mask(eigenvalues, sweep.energies, gap_threshold)
    logger.info('Removed %d discrete levels from %d eigenvalues', int(mask.sum()), len(mask))
    return eigenvalues[~mask]


def gbz_2d_separable(model, K=None):
    '''
    GBZ of a 2D lattice without diagonal hops as two independent circles.

    Args:
        model: LatticeModel2D
        K: Samples per axis

    Returns:
        SeparableGbz: radius_x = √|t_R/t_L|, radius_y = √|t_U/t_D| and
        E(k_x, k_y) = E_x(k_x) + E_y(k_y)

    Raises:
        NotSeparableError: If a diagonal hop is present
        DegenerateError: If an axis hop is zero
    '''
    if model.has_diagonal:
        raise NotSeparableError('diagonal hops couple the axes; the GBZ does not separate')
    x_chain = hatano_nelson(model.t_left, model.t_right, model.n_cols)
    y_chain = hatano_nelson(model.t_down, model.t_up, model.n_rows)
    x_sweep = circular_band_sweep(x_chain, K=K)
    y_sweep = circular_band_sweep(y_chain, K=K)
    return SeparableGbz(
        radius_x=x_sweep.radius,
        radius_y=y_sweep.radius,
        k_values=x_sweep.k_values,
        energies=x_sweep.energies[0][:, None] + y_sweep.energies[0][None, :],
    )
