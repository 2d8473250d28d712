'''
PT phase classification and the metric operator built from eigenstates.
'''

import logging
from dataclasses import replace

import numpy as np

from core import settings
from core.exceptions import NotPseudoHermitianError, ValidationError

from .models import SpectrumPhase

logger = logging.getLogger(__name__)


def classify_spectrum(eigenvalues, tol=None):
    '''
    Split a spectrum into real eigenvalues and complex-conjugate pairs.

    An eigenvalue is real when |Im E| <= tol·scale with
    scale = max(1, spectral radius). Every other eigenvalue with Im E > 0 is
    matched greedily to the closest unmatched eigenvalue within tol·scale of
    its conjugate.

    Args:
        eigenvalues: Complex eigenvalues
        tol: Relative tolerance (settings.CONJUGATE_TOL by default)

    Returns:
        SpectrumPhase

    Raises:
        NotPseudoHermitianError: If a complex eigenvalue has no conjugate
            partner, or two distinct partners compete for it

    Example:
        >>> str(classify_spectrum([1j, -1j, 0.5]).phase)
        'PT_BROKEN'
    '''
    tol = settings.CONJUGATE_TOL if tol is None else tol
    values = np.asarray(eigenvalues, dtype=complex)
    scale = max(1.0, float(np.abs(values).max())) if len(values) else 1.0
    bound = tol * scale

    real = np.abs(values.imag) <= bound
    real_indices = tuple(int(index) for index in np.flatnonzero(real))
    upper = [int(index) for index in np.flatnonzero(~real & (values.imag > 0))]
    lower = {int(index) for index in np.flatnonzero(~real & (values.imag < 0))}

    pairing = []
    for index in upper:
        target = values[index].conjugate()
        candidates = sorted(
            (abs(values[other] - target), other)
            for other in lower
            if abs(values[other] - target) <= bound
        )
        if not candidates:
            raise NotPseudoHermitianError(f'eigenvalue {values[index]:.6g} has no conjugate partner')
        partner = candidates[0][1]
        for _, other in candidates[1:]:
            if abs(values[other] - values[partner]) > bound:
                raise NotPseudoHermitianError(
                    f'ambiguous conjugate partner for eigenvalue {values[index]:.6g}'
                )
        lower.discard(partner)
        pairing.append((index, partner))

    if lower:
        orphan = values[min(lower)]
        raise NotPseudoHermitianError(f'eigenvalue {orphan:.6g} has no conjugate partner')

    phase = SpectrumPhase.Phase.PT_BROKEN if pairing else SpectrumPhase.Phase.PT_EXACT
    return SpectrumPhase(phase=phase, pairing=tuple(pairing), real_indices=real_indices)


def _metric_form(eta, first, second):
    '''⟨first|η|second⟩ for a diagonal (1D) or full metric.'''
    eta = np.asarray(eta)
    if eta.ndim == 1:
        return np.vdot(first, eta * second)
    return np.vdot(first, eta @ second)


def normalize_coefficients(eigensystem, phase, eta):
    '''
    Rescale biorthogonal pairs so the metric takes its canonical form.

    For a conjugate pair, η|ψ_-⟩ = G·|φ_+⟩ with G = ⟨ψ_+|η|ψ_-⟩; rescaling
    the (+) pair sets G = 1. For a real eigenvalue η|ψ_0⟩ = c·|φ_0⟩ with
    real c, and rescaling by √|c| leaves c = ±1. ⟨φ_i|ψ_i⟩ = 1 is kept.

    Args:
        eigensystem: BiorthogonalEigensystem of H
        phase: SpectrumPhase of its eigenvalues
        eta: Metric with ηH = Hᴴη, as a diagonal or a full matrix

    Returns:
        tuple: (rescaled eigensystem, signs c_i0 ordered as phase.real_indices)

    Raises:
        NotPseudoHermitianError: If η maps a state to zero
    '''
    right = eigensystem.right.copy()
    left = eigensystem.left.copy()

    for plus, minus in phase.pairing:
        coupling = _metric_form(eta, right[:, plus], right[:, minus])
        if abs(coupling) == 0:
            raise NotPseudoHermitianError(f'metric annihilates the pair ({plus}, {minus})')
        right[:, plus] /= coupling.conjugate()
        left[:, plus] *= coupling

    signs = []
    for index in phase.real_indices:
        norm = _metric_form(eta, right[:, index], right[:, index]).real
        if norm == 0:
            raise NotPseudoHermitianError(f'metric has a null direction at state {index}')
        right[:, index] /= np.sqrt(abs(norm))
        left[:, index] *= np.sqrt(abs(norm))
        signs.append(1 if norm > 0 else -1)

    logger.debug('Metric signature over real states: %+d', sum(signs))
    return replace(eigensystem, right=right, left=left), signs


def reconstruct_eta(eigensystem, phase, signs):
    '''
    Metric operator built from left eigenvectors.

    η = Σ_pairs (|φ_+⟩⟨φ_-| + |φ_-⟩⟨φ_+|) + Σ_real c_i0 |φ_i0⟩⟨φ_i0|

    Any choice of signs gives an η with ηH = Hᴴη; all +1 in the PT-exact
    phase gives a positive-definite metric.

    Args:
        eigensystem: BiorthogonalEigensystem
        phase: SpectrumPhase of the same eigenvalues
        signs: One of +1 / -1 per real eigenvalue

    Returns:
        numpy.ndarray: Hermitian matrix

    Raises:
        ValidationError: If the number of signs does not match the real eigenvalues
    '''
    if len(signs) != len(phase.real_indices):
        raise ValidationError(
            f'expected {len(phase.real_indices)} signs, got {len(signs)}', field='signs'
        )
    if any(sign not in (1, -1) for sign in signs):
        raise ValidationError('signs must be +1 or -1', field='signs')

    left = eigensystem.left
    size = left.shape[0]
    eta = np.zeros((size, size), dtype=complex)
    for plus, minus in phase.pairing:
        cross = np.outer(left[:, plus], left[:, minus].conj())
        eta += cross + cross.conj().T
    for sign, index in zip(signs, phase.real_indices):
        eta += sign * np.outer(left[:, index], left[:, index].conj())
    return eta
