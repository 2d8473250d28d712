'''
Normalized sublattice Zak phase on the generalized Brillouin zone.

The phase of a band is the winding of arg(ψ_A · ψ_M*), the phase of the
chosen sublattice relative to the last one, around the GBZ circle. Taking
it relative to a fixed component removes the arbitrary per-sample phase of
numerical eigenvectors.
'''

import logging

import numpy as np

from core import settings
from core.exceptions import GaugeSingularError, TrackingError, ValidationError

from .bands import band_track
from .models import NsZakResult

logger = logging.getLogger(__name__)

# Vectors are unit norm, so this is an absolute floor on |ψ_A|·|ψ_M|
SINGULAR_PROJECTION = 1e-12

# Largest distance of the accumulated phase from a multiple of 2π
INTEGRALITY_TOL = 1e-3


def _windings(vectors, k_values, sublattice, max_step):
    '''
    Phase traces and integer windings of column vectors vectors[j][:, band].

    Returns:
        tuple: (traces[band, j], windings)
    '''
    projected = vectors[:, sublattice - 1, :]
    reference = vectors[:, -1, :]
    weight = np.abs(projected) * np.abs(reference)
    if weight.min() < SINGULAR_PROJECTION:
        sample, band = np.unravel_index(np.argmin(weight), weight.shape)
        raise GaugeSingularError(
            f'band {band + 1} vanishes on sublattice {sublattice} at k = {k_values[sample]:.6g}; '
            'likely a band touching at a topological transition, which a finer K does not resolve'
        )
    traces = np.angle(projected * reference.conj()).T

    closed = np.concatenate((traces, traces[:, :1]), axis=1)
    steps = np.angle(np.exp(1j * np.diff(closed, axis=1)))
    largest = float(np.abs(steps).max())
    if largest > max_step:
        raise TrackingError(f'phase step {largest:.3g} exceeds {max_step:.3g}; K is too coarse')

    turns = -steps.sum(axis=1) / (2 * np.pi)
    rounded = np.rint(turns)
    if np.abs(turns - rounded).max() > INTEGRALITY_TOL:
        raise TrackingError(f'accumulated phase is not an integer winding: {turns}')
    return traces, tuple(int(value) for value in rounded)


def ns_zak_phase(track, sublattice=1, max_step=None):
    '''
    Winding of each band's sublattice phase around the GBZ.

    The winding is -(total unwrapped increment of θ)/2π; θ is computed the
    same way from the left vectors, whose windings are reported alongside.

    Args:
        track: BandTrack
        sublattice: Projected sublattice, 1-based
        max_step: Largest accepted phase increment between samples

    Returns:
        NsZakResult

    Raises:
        ValidationError: If sublattice is out of range
        GaugeSingularError: If a projection vanishes at a sample
        TrackingError: If a phase step exceeds max_step
    '''
    max_step = settings.MAX_PHASE_STEP if max_step is None else max_step
    size = track.right.shape[1]
    if not 1 <= sublattice <= size:
        raise ValidationError(f'must lie in [1, {size}]', field='sublattice')

    theta_r, windings = _windings(track.right, track.k_values, sublattice, max_step)
    theta_l, left_windings = _windings(track.left, track.k_values, sublattice, max_step)
    if left_windings != windings:
        logger.warning('Left windings %s differ from right windings %s', left_windings, windings)

    return NsZakResult(
        per_band_winding=windings,
        total=sum(windings),
        theta_r_trace=theta_r,
        theta_l_trace=theta_l,
        left_windings=left_windings,
        K=track.K,
        sublattice=sublattice,
    )


def compute_ns_zak(
    model, K=None, sublattice=1, radius=None, max_samples=None, ep_threshold=None
):
    '''
    Track the bands and compute their windings, doubling K when the tracking
    is too coarse.

    Args:
        model: LatticeModel1D
        K: Initial sample count (settings.ZAK_SAMPLES by default)
        sublattice: Projected sublattice, 1-based
        radius: GBZ radius, closed form by default
        max_samples: Ceiling for K (settings.ZAK_MAX_SAMPLES by default)
        ep_threshold: Smallest accepted condition estimate per k sample

    Returns:
        NsZakResult

    Raises:
        TrackingError: If tracking still fails at max_samples
    '''
    K = settings.ZAK_SAMPLES if K is None else K
    max_samples = settings.ZAK_MAX_SAMPLES if max_samples is None else max_samples
    while True:
        try:
            track = band_track(model, K=K, radius=radius, ep_threshold=ep_threshold)
            return ns_zak_phase(track, sublattice)
        except TrackingError as error:
            if 2 * K > max_samples:
                raise
            logger.debug('%s; retrying with K = %d', error, 2 * K)
            K *= 2


def edge_state_prediction(model, K=None):
    '''
    Number of boundary states predicted by the summed NS Zak phases.

    Example:
        >>> edge_state_prediction(ssh3((1.0, 1.0, 1.0), (0.3, 0.3, 1.0), 20))
        4
    '''
    return compute_ns_zak(model, K=K).total
