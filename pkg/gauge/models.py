from dataclasses import dataclass, field
from core.compat import StrEnum

import numpy as np

from core.exceptions import DegenerateError, GaugeViolationError


@dataclass(frozen=True, eq=False)
class IgtScaling:
    '''
    Diagonal imaginary gauge transformation S of a 1D chain.

    The entry for sublattice i of cell n is sub_factors[i - 1] · cell_factor^n
    with n counted from 1. Conjugating H by S (S⁻¹ H S) rescales every
    nearest-neighbour pair t_R, t_L to the geometric mean √(t_L·t_R).

    Attributes:
        cell_factor: r_M, the per-cell geometric factor
        sub_factors: (r_0, ..., r_(M-1)) with r_0 = 1
        n_cells: Number of cells the diagonal covers
    '''

    cell_factor: complex
    sub_factors: tuple
    n_cells: int

    @property
    def diag(self):
        cells = np.arange(1, self.n_cells + 1)
        powers = np.power(complex(self.cell_factor), cells)
        return np.outer(powers, np.asarray(self.sub_factors, dtype=complex)).ravel()

    @property
    def matrix(self):
        return np.diag(self.diag)


@dataclass(frozen=True, eq=False)
class EtaMetric:
    '''
    Diagonal metric η_I = S⁻² generated by the gauge transformation.

    Attributes:
        diag: Real diagonal, R_(i-1) · R_M^n for sublattice i of cell n
        definiteness: POSITIVE_DEFINITE when every R_i > 0
    '''

    class Definiteness(StrEnum):
        POSITIVE_DEFINITE = 'POSITIVE_DEFINITE'
        INDEFINITE = 'INDEFINITE'

    diag: np.ndarray
    definiteness: Definiteness

    @property
    def matrix(self):
        return np.diag(self.diag)


@dataclass(frozen=True, eq=False)
class GaugeReport:
    '''
    Outcome of the path-independence check on a finite hopping graph.

    Attributes:
        status: Classification of the edge ratios
        site_potentials: 1-based site -> squared scale, when consistent
        violating_cycle: Edges (1-based site pairs) of a violating cycle
        max_cycle_residual: Largest modulus or phase mismatch over all cycles

    Status meanings:
        - HERMITIZABLE: every ratio real positive, all cycles consistent
        - ETA_I_PSEUDO: every ratio real, some negative, all cycles consistent
        - COMPLEX_SCALABLE: consistent but some ratio is complex
        - VIOLATED: some cycle product differs from 1
        - DEGENERATE: some hop amplitude is zero
    '''

    class Status(StrEnum):
        HERMITIZABLE = 'HERMITIZABLE'
        ETA_I_PSEUDO = 'ETA_I_PSEUDO'
        COMPLEX_SCALABLE = 'COMPLEX_SCALABLE'
        VIOLATED = 'VIOLATED'
        DEGENERATE = 'DEGENERATE'

    status: Status
    site_potentials: dict = field(default_factory=dict)
    violating_cycle: list = field(default_factory=list)
    max_cycle_residual: float = 0.0

    @property
    def is_consistent(self):
        return self.status not in (self.Status.VIOLATED, self.Status.DEGENERATE)

    def raise_for_status(self):
        '''
        Raise when the graph admits no diagonal gauge.

        Raises:
            DegenerateError: For DEGENERATE reports
            GaugeViolationError: For VIOLATED reports
        '''
        if self.status == self.Status.DEGENERATE:
            raise DegenerateError('a hop amplitude is zero; no gauge exists')
        if self.status == self.Status.VIOLATED:
            raise GaugeViolationError(
                f'hopping ratios are path dependent '
                f'(cycle residual {self.max_cycle_residual:.3g})',
                report=self,
            )
        return self

    def to_dict(self):
        return {
            'status': str(self.status),
            'max_cycle_residual': float(self.max_cycle_residual),
            'violating_cycle': [list(edge) for edge in self.violating_cycle],
        }


@dataclass(frozen=True, eq=False)
class GaugeGrid2D:
    '''
    Site factors r_x^m · r_y^n of the 2D gauge transformation.

    factors[n - 1, m - 1] belongs to column m and row n, matching the
    row-major site index of the 2D Hamiltonian.
    '''

    r_x: complex
    r_y: complex
    factors: np.ndarray

    @property
    def diag(self):
        return self.factors.ravel()
