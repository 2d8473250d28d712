'''
Localization rates of skin modes from eigenvector envelopes.
'''

import logging
import math

import numpy as np
from scipy import stats

from core.exceptions import UnsupportedModelError, ValidationError
from lattice.models import LatticeModel1D

from .models import EnvelopeFit, EnvelopeFit2D

logger = logging.getLogger(__name__)

MIN_FIT_CELLS = 4

# Relative amplitude below which a cell is treated as a node
NODE_FLOOR = 1e-10

# Relative weight |φ_s ψ_s| below which a 2D site is treated as a node
NODE_FLOOR_2D = 1e-8


def fit_window(n_cells):
    '''
    Interior cells used for envelope fits, 1-based and inclusive.

    The window drops the outer quarter on each side and is symmetric under
    n -> N + 1 - n.
    '''
    first = max(2, math.ceil(n_cells / 4))
    return first, n_cells + 1 - first


def _theoretical_kappa(model):
    products = abs(np.prod(model.t_right) / np.prod(model.t_left))
    return 0.5 * float(np.log(products))


def _fit(positions, values):
    fit = stats.linregress(positions, values)
    return fit.slope, fit.rvalue ** 2


def localization_lengths(eigensystem, model, indices=None):
    '''
    Fit the per-cell log envelope of each state over the interior window.

    The per-cell amplitude is the largest |ψ| over the cell's sublattices.
    Cells whose amplitude is a node are dropped together with their mirror
    cells, so standing-wave modulation that is symmetric under reflection
    does not bias the slope.

    Args:
        eigensystem: BiorthogonalEigensystem (or Eigenpairs) of the open chain
        model: LatticeModel1D the states belong to
        indices: Eigenpair indices to fit, all by default

    Returns:
        EnvelopeFit: kappa per state (1/cells) and theoretical_kappa = ln|r_M|

    Raises:
        UnsupportedModelError: For periodic chains
        ValidationError: If the window holds fewer than four cells
    '''
    if model.boundary != LatticeModel1D.Boundary.OBC:
        raise UnsupportedModelError('envelopes are defined for open chains')
    first, last = fit_window(model.n_cells)
    if last - first + 1 < MIN_FIT_CELLS:
        raise ValidationError(
            f'N = {model.n_cells} leaves fewer than {MIN_FIT_CELLS} interior cells', field='N'
        )
    if indices is None:
        indices = np.arange(len(eigensystem.eigenvalues))
    indices = np.asarray(indices, dtype=int)

    cells = np.arange(first, last + 1)
    kappas, qualities = [], []
    for index in indices:
        amplitudes = np.abs(eigensystem.right[:, index]).reshape(model.n_cells, model.n_sub).max(axis=1)
        window = amplitudes[first - 1:last]
        keep = window > NODE_FLOOR * amplitudes.max()
        keep &= keep[::-1]
        if keep.sum() < MIN_FIT_CELLS:
            logger.debug('State %d is nodal over the fit window', index)
            kappas.append(np.nan)
            qualities.append(0.0)
            continue
        slope, quality = _fit(cells[keep], np.log(window[keep]))
        kappas.append(slope)
        qualities.append(quality)

    return EnvelopeFit(
        per_state_kappa=np.array(kappas),
        r_squared=np.array(qualities),
        theoretical_kappa=_theoretical_kappa(model),
        indices=indices,
        window=(first, last),
    )


def _slice_rate(right, left, sites):
    weight = np.abs(left[sites].conj() * right[sites])
    keep = weight > NODE_FLOOR_2D * weight.max()
    if keep.sum() < 2:
        return np.nan
    positions = np.arange(1, len(sites) + 1)[keep]
    ratio = np.log(np.abs(right[sites][keep])) - np.log(np.abs(left[sites][keep]))
    # ln|ψ/φ| grows twice as fast as ln|ψ|
    return 0.5 * _fit(positions, ratio)[0]


def localization_lengths_2d(eigensystem, model, indices=None):
    '''
    Decay rates of 2D skin modes along the y = 1 row and the x = 1 column.

    For a gauge-consistent lattice ψ = S·u and φ = S⁻¹·u with u the state of
    the Hermitian counterpart, so ln|ψ_s/φ_s| = 2 ln S_s + const carries no
    standing-wave modulation. Half its slope is the decay rate per site.

    Args:
        eigensystem: BiorthogonalEigensystem of the 2D Hamiltonian
        model: LatticeModel2D
        indices: Eigenpair indices to fit, all by default

    Returns:
        EnvelopeFit2D

    Raises:
        ValidationError: If either side has fewer than four sites
    '''
    errors = {}
    if model.n_cols < MIN_FIT_CELLS:
        errors['Mx'] = [f'at least {MIN_FIT_CELLS} columns are needed for a fit']
    if model.n_rows < MIN_FIT_CELLS:
        errors['Ny'] = [f'at least {MIN_FIT_CELLS} rows are needed for a fit']
    if errors:
        raise ValidationError(errors)
    if indices is None:
        indices = np.arange(len(eigensystem.eigenvalues))

    row = np.array([model.site(column, 1) for column in range(1, model.n_cols + 1)])
    column = np.array([model.site(1, row_index) for row_index in range(1, model.n_rows + 1)])

    kappa_x, kappa_y = [], []
    for index in indices:
        right = eigensystem.right[:, index]
        left = eigensystem.left[:, index]
        kappa_x.append(_slice_rate(right, left, row))
        kappa_y.append(_slice_rate(right, left, column))

    return EnvelopeFit2D(
        kappa_x=np.array(kappa_x),
        kappa_y=np.array(kappa_y),
        theoretical_kappa_x=0.5 * float(np.log(abs(model.t_right / model.t_left))),
        theoretical_kappa_y=0.5 * float(np.log(abs(model.t_up / model.t_down))),
    )
