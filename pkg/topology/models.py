from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class BandTrack:
    '''
    Continuity-ordered eigenstates of H(beta) around the circular GBZ.

    Attributes:
        K: Number of samples
        radius: GBZ radius r, beta = r·e^(ik)
        k_values: Sample momenta 2πj/K
        energies: energies[band, j]
        right: right[j][:, band] is |ψ_band(k_j)⟩
        left: left[j][:, band] is |φ_band(k_j)⟩
    '''

    K: int
    radius: float
    k_values: np.ndarray
    energies: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def n_bands(self):
        return self.energies.shape[0]

    def band(self, index):
        '''(E, ψ, φ) samples of one band.'''
        return list(zip(self.energies[index], self.right[:, :, index], self.left[:, :, index]))


@dataclass(frozen=True, eq=False)
class NsZakResult:
    '''
    Normalized sublattice Zak phases of every band, in units of 2π.

    Attributes:
        per_band_winding: Integer winding per band
        total: Sum of the windings, the predicted number of boundary states
        theta_r_trace: theta_r_trace[band, j], phase from right vectors
        theta_l_trace: Same from left vectors
        left_windings: Integer windings from the left vectors
        K: Samples used
        sublattice: Projected sublattice, 1-based
    '''

    per_band_winding: tuple
    total: int
    theta_r_trace: np.ndarray
    theta_l_trace: np.ndarray
    left_windings: tuple
    K: int
    sublattice: int = 1

    @property
    def left_right_agree(self):
        return tuple(self.left_windings) == tuple(self.per_band_winding)

    def to_dict(self):
        return {
            'per_band': [int(value) for value in self.per_band_winding],
            'total': int(self.total),
            'K': int(self.K),
            'sublattice': int(self.sublattice),
            'left_right_agree': bool(self.left_right_agree),
        }


@dataclass(frozen=True)
class InvarianceReport:
    '''Comparison of a model with its (t_L1, t_R1) -> (α·t_L1, t_R1/α) rescaling.'''

    passed: bool
    alpha: float
    spectrum_deviation: float
    windings: tuple
    rescaled_windings: tuple

    def to_dict(self):
        return {
            'passed': self.passed,
            'alpha': self.alpha,
            'spectrum_deviation': self.spectrum_deviation,
            'windings': list(self.windings),
            'rescaled_windings': list(self.rescaled_windings),
        }


@dataclass(frozen=True)
class PhaseDiagramCell:
    '''
    One grid point of the SSH3 phase diagram.

    edge_count is None on the axes (pt_phase DEGENERATE) and at transitions,
    where adjacent_counts lists the counts of the four neighbouring cells.
    '''

    x: float
    y: float
    edge_count: int = None
    pt_phase: str = 'DEGENERATE'
    adjacent_counts: tuple = ()

    @property
    def is_transition(self):
        return self.edge_count is None and self.pt_phase != 'DEGENERATE'


@dataclass(frozen=True, eq=False)
class PhaseDiagramGrid:
    '''
    Edge-state counts over x = t_L1·t_R1/t3², y = t_L2·t_R2/t3².

    cells are stored row-major: y outer, x inner.
    '''

    t3: float
    x_values: np.ndarray
    y_values: np.ndarray
    cells: list = field(default_factory=list)

    def cell(self, column, row):
        return self.cells[row * len(self.x_values) + column]
