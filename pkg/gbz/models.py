from dataclasses import dataclass, field

import numpy as np

from core import settings


@dataclass(frozen=True, eq=False)
class CharPoly:
    '''
    det(H(beta) - E) multiplied by beta^pole_order.

    Attributes:
        coefficients: Complex coefficients, highest power first
        energy: Energy E the polynomial was built at
        pole_order: Power of 1/beta removed from the Laurent determinant
        balanced: False when the forward and backward hopping ranges differ

    Example:
        For Hatano-Nelson, coefficients are (t_L, -E, t_R) and pole_order is 1.
    '''

    coefficients: np.ndarray
    energy: complex
    pole_order: int
    balanced: bool = True

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, beta):
        return np.polyval(self.coefficients, beta)


@dataclass(frozen=True, eq=False)
class GbzCurve:
    '''
    Middle-modulus roots of the characteristic polynomial over a set of energies.

    Attributes:
        points: (E, beta) pairs, at least two per energy
        radius: Median |beta| over all points
        max_radial_deviation: max ||beta| - radius|
        theoretical_radius: Closed-form radius, None when no closed form exists
        balanced: False if the rank convention was applied to an unbalanced model
    '''

    points: list
    radius: float
    max_radial_deviation: float
    theoretical_radius: float = None
    balanced: bool = True

    @property
    def energies(self):
        return np.array([energy for energy, _ in self.points], dtype=complex)

    @property
    def betas(self):
        return np.array([beta for _, beta in self.points], dtype=complex)

    def is_circular(self, tol=None):
        tol = settings.CIRCULAR_TOL if tol is None else tol
        return self.max_radial_deviation < tol * self.radius

    def to_dict(self, tol=None):
        return {
            'radius_fit': float(self.radius),
            'radius_theory': None if self.theoretical_radius is None else float(self.theoretical_radius),
            'max_dev': float(self.max_radial_deviation),
            'circular': bool(self.is_circular(tol)),
            'balanced': bool(self.balanced),
        }


@dataclass(frozen=True, eq=False)
class BandSweep:
    '''
    Continuum bands E_band(k) on a circle beta = r·e^(ik).

    energies[band, j] belongs to k_values[j]; skipped samples hold NaN.
    '''

    radius: float
    k_values: np.ndarray
    energies: np.ndarray
    skipped: tuple = ()

    @property
    def n_bands(self):
        return self.energies.shape[0]

    def samples(self):
        '''All finite band energies as a flat array.'''
        flat = self.energies.ravel()
        return flat[np.isfinite(flat)]


@dataclass(frozen=True)
class PairingReport:
    '''Outcome of the beta -> r_M²/beta root-pairing check.'''

    passed: bool
    max_residual: float
    failed_energies: tuple = field(default_factory=tuple)


@dataclass(frozen=True, eq=False)
class SeparableGbz:
    '''
    GBZ of a 2D lattice without diagonal hops.

    energies[i, j] = E_x(k_values[i]) + E_y(k_values[j]).
    '''

    radius_x: float
    radius_y: float
    k_values: np.ndarray
    energies: np.ndarray
