from dataclasses import replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from core.exceptions import ValidationError
from lattice.hamiltonians import build_real_space
from spectral.eigen import eig_full

from .models import InvarianceReport
from .zak import compute_ns_zak

SPECTRUM_TOL = 1e-8


def rescale_first_bond(model, alpha):
    '''Model with (t_L1, t_R1) replaced by (α·t_L1, t_R1/α).'''
    if alpha == 0:
        raise ValidationError('must be nonzero', field='alpha')
    t_left = (alpha * model.t_left[0],) + model.t_left[1:]
    t_right = (model.t_right[0] / alpha,) + model.t_right[1:]
    return replace(model, t_left=t_left, t_right=t_right)


def parameter_set_invariance_check(model, alpha, K=None):
    '''
    Check that rescaling the first bond leaves spectrum and windings unchanged.

    The product t_L1·t_R1 is kept, so the two chains are related by a
    diagonal similarity under open boundaries.

    Args:
        model: LatticeModel1D
        alpha: Nonzero rescaling factor
        K: Initial samples for the Zak phase

    Returns:
        InvarianceReport
    '''
    rescaled = rescale_first_bond(model, alpha)

    original = eig_full(build_real_space(model)).eigenvalues
    transformed = eig_full(build_real_space(rescaled)).eigenvalues
    distances = np.abs(np.subtract.outer(original, transformed))
    rows, columns = linear_sum_assignment(distances)
    scale = max(1.0, float(np.abs(original).max()))
    deviation = float(distances[rows, columns].max()) / scale

    first = compute_ns_zak(model, K=K)
    second = compute_ns_zak(rescaled, K=K)
    windings = tuple(sorted(first.per_band_winding))
    rescaled_windings = tuple(sorted(second.per_band_winding))

    passed = (
        deviation <= SPECTRUM_TOL
        and first.total == second.total
        and windings == rescaled_windings
    )
    return InvarianceReport(
        passed=passed,
        alpha=float(alpha),
        spectrum_deviation=deviation,
        windings=windings,
        rescaled_windings=rescaled_windings,
    )
