from dataclasses import dataclass, field
from core.compat import StrEnum

import numpy as np


@dataclass(frozen=True, eq=False)
class Eigenpairs:
    '''
    Right eigenpairs of a dense matrix ordered by (Re E, Im E).

    Attributes:
        eigenvalues: Complex eigenvalues
        right: Column eigenvectors, unit norm
        condition_estimate: 1 / cond of the eigenvector matrix in the
            balanced basis; values near 0 flag an exceptional point
    '''

    eigenvalues: np.ndarray
    right: np.ndarray
    condition_estimate: float


@dataclass(frozen=True, eq=False)
class BiorthogonalEigensystem:
    '''
    Right and left eigenvectors with ⟨φ_i|ψ_j⟩ = δ_ij.

    Right vectors satisfy H|ψ_i⟩ = E_i|ψ_i⟩ and left vectors
    Hᴴ|φ_i⟩ = E_i*|φ_i⟩; both are stored as matrix columns.

    Attributes:
        eigenvalues: Complex eigenvalues E_i
        right: Columns |ψ_i⟩
        left: Columns |φ_i⟩
        condition_estimate: Distance-to-EP proxy (see Eigenpairs)
    '''

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition_estimate: float

    @property
    def size(self):
        return len(self.eigenvalues)

    def biorthogonality_residual(self):
        '''Largest entry of |ΦᴴΨ − I|.'''
        overlap = self.left.conj().T @ self.right
        return float(np.abs(overlap - np.eye(self.size)).max())

    def take(self, indices):
        '''Sub-system restricted to the given eigenpair indices.'''
        indices = np.asarray(indices, dtype=int)
        return BiorthogonalEigensystem(
            eigenvalues=self.eigenvalues[indices],
            right=self.right[:, indices],
            left=self.left[:, indices],
            condition_estimate=self.condition_estimate,
        )


@dataclass(frozen=True)
class SpectrumPhase:
    '''
    PT phase of a spectrum and its conjugate pairing.

    Attributes:
        phase: PT_EXACT when every eigenvalue is real
        pairing: Index pairs (i_+, i_-) with E_(i_-) = E_(i_+)* and Im E_(i_+) > 0
        real_indices: Indices of the real eigenvalues
    '''

    class Phase(StrEnum):
        PT_EXACT = 'PT_EXACT'
        PT_BROKEN = 'PT_BROKEN'

    phase: Phase
    pairing: tuple = ()
    real_indices: tuple = ()

    def to_dict(self):
        return {
            'phase': str(self.phase),
            'pairs': len(self.pairing),
            'real': len(self.real_indices),
        }


@dataclass(frozen=True, eq=False)
class EnvelopeFit:
    '''
    Exponential decay rates of skin modes.

    A positive kappa means the state grows towards the right edge.

    Attributes:
        per_state_kappa: Log-slope per cell of each fitted state
        r_squared: Quality of each linear fit
        theoretical_kappa: ln|r_M|
        indices: Eigenpair index of each fitted state
        window: First and last cell of the fit window (1-based, inclusive)
    '''

    per_state_kappa: np.ndarray
    r_squared: np.ndarray
    theoretical_kappa: float
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    window: tuple = ()

    def to_dict(self):
        kappa = self.per_state_kappa
        return {
            'theoretical_kappa': float(self.theoretical_kappa),
            'median_kappa': float(np.median(kappa)) if len(kappa) else None,
            'min_r_squared': float(np.min(self.r_squared)) if len(kappa) else None,
            'states': int(len(kappa)),
            'window': list(self.window),
        }


@dataclass(frozen=True, eq=False)
class EnvelopeFit2D:
    '''
    Decay rates of 2D skin modes along the y = 1 row and the x = 1 column.

    States whose slice is mostly nodal carry NaN.
    '''

    kappa_x: np.ndarray
    kappa_y: np.ndarray
    theoretical_kappa_x: float
    theoretical_kappa_y: float

    def to_dict(self):
        return {
            'median_kappa_x': float(np.nanmedian(self.kappa_x)),
            'median_kappa_y': float(np.nanmedian(self.kappa_y)),
            'theoretical_kappa_x': float(self.theoretical_kappa_x),
            'theoretical_kappa_y': float(self.theoretical_kappa_y),
            'states': int(len(self.kappa_x)),
        }
