'''
Discrete levels: open-boundary eigenvalues away from the continuum bands.

With an explicit gap_threshold an eigenvalue is discrete when its distance
to every band sample exceeds gap_threshold·max(1, spectral radius).

Without one the bands are traced as curves through consecutive samples and
each eigenvalue is compared with the finite-size scatter of the bulk states
of its nearest band: discrete when its distance exceeds GAP_FACTOR times the
lower median distance of that band, and at least GAP_FLOOR·max(1, spectral
radius).
'''

import logging

import numpy as np
from scipy.spatial import cKDTree

from core import settings

logger = logging.getLogger(__name__)

# Segments longer than this multiple of the median step join different bands
MAX_STEP_RATIO = 10.0


def _as_points(values):
    values = np.asarray(values, dtype=complex).ravel()
    return np.column_stack((values.real, values.imag))


def _segments(bands):
    '''Closed polylines through the samples of each band, NaN gaps removed.'''
    starts, ends, owners = [], [], []
    for index, band in enumerate(bands):
        following = np.roll(band, -1)
        valid = np.isfinite(band) & np.isfinite(following)
        starts.append(band[valid])
        ends.append(following[valid])
        owners.append(np.full(int(valid.sum()), index))
    starts, ends, owners = np.concatenate(starts), np.concatenate(ends), np.concatenate(owners)

    lengths = np.abs(ends - starts)
    if np.any(lengths > 0):
        limit = MAX_STEP_RATIO * np.median(lengths[lengths > 0])
        keep = lengths <= limit
        # A band jump becomes two isolated points
        starts = np.concatenate((starts[keep], starts[~keep], ends[~keep]))
        ends = np.concatenate((ends[keep], starts[~keep], ends[~keep]))
        owners = np.concatenate((owners[keep], owners[~keep], owners[~keep]))
    return starts, ends, owners


def _curve_distances(eigenvalues, bands):
    '''
    Distance of every eigenvalue to the traced bands.

    Returns:
        tuple: (distances, index of the nearest band)
    '''
    starts, ends, owners = _segments(bands)
    steps = ends - starts
    weights = np.abs(steps) ** 2
    offsets = eigenvalues[:, None] - starts[None, :]
    with np.errstate(invalid='ignore', divide='ignore'):
        position = np.where(weights > 0, (offsets * steps.conj()).real / weights, 0.0)
    position = np.clip(position, 0.0, 1.0)
    distances = np.abs(offsets - position * steps)
    nearest = np.argmin(distances, axis=1)
    rows = np.arange(len(eigenvalues))
    return distances[rows, nearest], owners[nearest]


def discrete_mask(obc_eigenvalues, continuum_band_samples, gap_threshold=None):
    '''
    Flag eigenvalues that lie away from the continuum bands.

    Args:
        obc_eigenvalues: Open-boundary eigenvalues
        continuum_band_samples: Band energies; rows of a 2D array are bands
            sampled along k (BandSweep.energies), a 1D array is one band
        gap_threshold: Distance to the nearest sample, relative to
            max(1, spectral radius); adaptive per band when omitted

    Returns:
        numpy.ndarray: Boolean mask, True for isolated levels
    '''
    eigenvalues = np.asarray(obc_eigenvalues, dtype=complex).ravel()
    bands = np.atleast_2d(np.asarray(continuum_band_samples, dtype=complex))
    if not len(eigenvalues):
        return np.zeros(0, dtype=bool)
    if not np.isfinite(bands).any():
        logger.warning('No continuum samples; every level counts as discrete')
        return np.ones(len(eigenvalues), dtype=bool)

    scale = max(1.0, float(np.abs(eigenvalues).max()))
    if gap_threshold is not None:
        samples = bands.ravel()
        samples = samples[np.isfinite(samples)]
        distances, _ = cKDTree(_as_points(samples)).query(_as_points(eigenvalues))
        return distances > gap_threshold * scale

    distances, owners = _curve_distances(eigenvalues, bands)
    thresholds = np.full(len(eigenvalues), settings.GAP_FLOOR * scale)
    for band in np.unique(owners):
        members = owners == band
        bulk = np.quantile(distances[members], 0.5, method='lower')
        thresholds[members] = np.maximum(thresholds[members], settings.GAP_FACTOR * bulk)
        logger.debug('Band %d: %d levels, bulk distance %.3g', band, int(members.sum()), bulk)
    return distances > thresholds


def detect_discrete_levels(obc_eigenvalues, continuum_band_samples, gap_threshold=None):
    '''
    Isolated eigenvalues away from the continuum bands.

    Example:
        >>> detect_discrete_levels([0, 5], np.linspace(-1, 1, 50))
        array([5.+0.j])
    '''
    eigenvalues = np.asarray(obc_eigenvalues, dtype=complex)
    mask = discrete_mask(eigenvalues, continuum_band_samples, gap_threshold)
    return eigenvalues[mask]
