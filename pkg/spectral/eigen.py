'''
Dense eigendecomposition of non-Hermitian matrices.

Skin modes grow exponentially along the chain, so the eigenvector matrix is
badly conditioned in the site basis even far from an exceptional point.
Matrices are diagonalised after the modulus gauge grading of
gauge.paths.modulus_grading, followed by diagonal balancing, and the
condition estimate is taken in that basis.
'''

import logging

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from core import settings
from core.exceptions import NearExceptionalPointError, SolverError, ValidationError
from gauge.paths import modulus_grading

from .models import BiorthogonalEigensystem, Eigenpairs

logger = logging.getLogger(__name__)


def _as_square(hamiltonian):
    matrix = np.asarray(hamiltonian)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise ValidationError(f'expected a non-empty square matrix, got shape {matrix.shape}')
    if np.iscomplexobj(matrix) and not np.any(matrix.imag):
        # Real arithmetic keeps conjugate pairs exact
        matrix = matrix.real
    return matrix


def _balanced_eig(hamiltonian):
    '''
    Eigen-decompose in the graded and balanced basis.

    Returns:
        tuple: (eigenvalues, vectors with unit columns in that basis, diagonal
        mapping them back to sites, condition estimate), sorted by (Re, Im)
    '''
    matrix = _as_square(hamiltonian)
    grading = modulus_grading(matrix)
    graded = matrix * (grading[None, :] / grading[:, None])
    balanced, balance = linalg.matrix_balance(graded, permute=False)
    transform = grading[:, None] * balance
    try:
        eigenvalues, vectors = linalg.eig(balanced)
    except linalg.LinAlgError as error:
        raise SolverError(f'eigensolver did not converge for a {matrix.shape[0]}x{matrix.shape[0]} matrix') from error

    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order].astype(complex)
    vectors /= np.linalg.norm(vectors, axis=0)

    condition = np.linalg.cond(vectors)
    estimate = 0.0 if not np.isfinite(condition) else float(1.0 / condition)
    return eigenvalues.astype(complex), vectors, np.diag(transform), estimate


def _normalize_columns(vectors):
    '''Unit columns whose largest-modulus entry is real and positive.'''
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    peaks = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])]
    return vectors * (np.abs(peaks) / peaks)


def eig_full(hamiltonian):
    '''
    Eigenvalues and right eigenvectors of a dense matrix.

    Args:
        hamiltonian: Square matrix

    Returns:
        Eigenpairs: Sorted by (Re E, Im E), unit-norm right vectors

    Raises:
        ValidationError: If the input is not a non-empty square matrix
        SolverError: If the eigensolver does not converge

    Example:
        >>> eig_full(np.eye(3)).eigenvalues
        array([1.+0.j, 1.+0.j, 1.+0.j])
    '''
    eigenvalues, vectors, transform, estimate = _balanced_eig(hamiltonian)
    right = _normalize_columns(transform[:, None] * vectors)

    matrix = np.asarray(hamiltonian)
    residual = np.linalg.norm(matrix @ right - right * eigenvalues, axis=0).max()
    scale = max(np.linalg.norm(matrix), np.finfo(float).tiny)
    if residual > 1e-9 * scale:
        logger.warning('Eigenpair residual %.3g exceeds 1e-9 * ||H||', residual / scale)
    return Eigenpairs(eigenvalues=eigenvalues, right=right, condition_estimate=estimate)


def biorthogonal_system(hamiltonian, ep_threshold=None):
    '''
    Right and left eigenvectors normalised so that ⟨φ_i|ψ_j⟩ = δ_ij.

    Left vectors are the conjugated rows of the inverse right-eigenvector
    matrix, so Hᴴ|φ_i⟩ = E_i*|φ_i⟩ holds without a second diagonalisation.

    Args:
        hamiltonian: Square matrix
        ep_threshold: Smallest accepted condition estimate

    Returns:
        BiorthogonalEigensystem

    Raises:
        NearExceptionalPointError: If the eigenvector matrix is close to singular
    '''
    ep_threshold = settings.EP_THRESHOLD if ep_threshold is None else ep_threshold
    eigenvalues, vectors, transform, estimate = _balanced_eig(hamiltonian)
    if estimate < ep_threshold:
        raise NearExceptionalPointError(
            f'eigenvectors nearly coalesce (condition estimate {estimate:.3g})',
            condition_estimate=estimate,
        )

    inverse = linalg.inv(vectors)
    right = transform[:, None] * vectors
    left = inverse.conj().T / transform[:, None]

    norms = np.linalg.norm(right, axis=0)
    peaks = right[np.argmax(np.abs(right), axis=0), np.arange(right.shape[1])]
    factors = np.abs(peaks) / (peaks * norms)
    right = right * factors
    left = left / factors.conj()

    return BiorthogonalEigensystem(
        eigenvalues=eigenvalues,
        right=right,
        left=left,
        condition_estimate=estimate,
    )


def match_by_overlap(previous, current):
    '''
    Match eigenvectors of neighbouring samples by maximal normalised overlap.

    Args:
        previous: Columns of the previous sample
        current: Columns of the current sample

    Returns:
        tuple: (order, overlaps) where current[:, order[b]] continues
        previous[:, b] and overlaps[b] is their normalised overlap
    '''
    overlap = np.abs(previous.conj().T @ current)
    overlap /= np.outer(np.linalg.norm(previous, axis=0), np.linalg.norm(current, axis=0))
    rows, columns = linear_sum_assignment(overlap, maximize=True)
    order = np.empty(len(rows), dtype=int)
    order[rows] = columns
    return order, overlap[rows, columns][np.argsort(rows)]
