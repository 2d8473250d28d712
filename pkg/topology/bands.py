import logging

import numpy as np

from core import settings
from core.exceptions import NearExceptionalPointError, TrackingError, ValidationError
from gbz.curves import theoretical_radius
from lattice.hamiltonians import bloch_eval, hopping_blocks
from spectral.eigen import biorthogonal_system, match_by_overlap

from .models import BandTrack

logger = logging.getLogger(__name__)

MIN_TRACK_SAMPLES = 64


def band_track(model, K=None, radius=None, ep_threshold=None, min_overlap=None):
    '''
    Follow every band of H(beta) once around the circular GBZ.

    The first sample is ordered by (Re E, Im E); each following sample is
    matched to its predecessor by maximal eigenvector overlap.

    Args:
        model: LatticeModel1D
        K: Samples around the circle (at least 64)
        radius: GBZ radius, theoretical_radius(model) by default
        ep_threshold: Smallest accepted condition estimate
        min_overlap: Continuity certificate between neighbouring samples

    Returns:
        BandTrack

    Raises:
        ValidationError: If K < 64
        NearExceptionalPointError: If bands touch at a sample
        TrackingError: If continuity is lost or the bands do not close
    '''
    K = settings.ZAK_SAMPLES if K is None else K
    min_overlap = settings.MIN_OVERLAP if min_overlap is None else min_overlap
    if K < MIN_TRACK_SAMPLES:
        raise ValidationError(f'at least {MIN_TRACK_SAMPLES} samples are needed', field='K')
    radius = theoretical_radius(model) if radius is None else float(radius)
    bloch_matrix = hopping_blocks(model)

    k_values = 2 * np.pi * np.arange(K) / K
    size = model.n_sub
    energies = np.empty((size, K), dtype=complex)
    right = np.empty((K, size, size), dtype=complex)
    left = np.empty((K, size, size), dtype=complex)

    for index, k in enumerate(k_values):
        try:
            system = biorthogonal_system(
                bloch_eval(bloch_matrix, radius * np.exp(1j * k)), ep_threshold
            )
        except NearExceptionalPointError as error:
            raise NearExceptionalPointError(
                f'bands touch near k = {k:.6g}', condition_estimate=error.condition_estimate
            ) from error
        order = np.arange(size)
        if index:
            order, overlaps = match_by_overlap(right[index - 1], system.right)
            if overlaps.min() < min_overlap:
                raise TrackingError(
                    f'band continuity lost at k = {k:.6g} (overlap {overlaps.min():.3g})'
                )
        energies[:, index] = system.eigenvalues[order]
        right[index] = system.right[:, order]
        left[index] = system.left[:, order]

    closing, overlaps = match_by_overlap(right[-1], right[0])
    if np.any(closing != np.arange(size)) or overlaps.min() < min_overlap:
        raise TrackingError('bands do not close around the GBZ')

    logger.debug('Tracked %d bands over %d samples at radius %.6g', size, K, radius)
    return BandTrack(
        K=K, radius=radius, k_values=k_values, energies=energies, right=right, left=left,
    )
