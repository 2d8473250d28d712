import numpy as np

from core.exceptions import DegenerateError, ValidationError

from .models import BiorthogonalEigensystem


def hn_analytic_spectrum(t_left, t_right, n_cells):
    '''
    Closed-form open-chain eigensystem of the Hatano-Nelson model.

    With r the principal square root of t_R/t_L and k_j = jπ/(N+1), the
    eigenvalues are E_j = 2·t_L·r·cos k_j, right states r^n sin(n k_j) and
    left states (r*)^(-n) sin(n k_j)·2/(N+1). A negative ratio makes r
    imaginary and the spectrum purely imaginary, which is the PT-broken
    branch of the same formula.

    Args:
        t_left: Leftward amplitude t_L
        t_right: Rightward amplitude t_R
        n_cells: Chain length N

    Returns:
        BiorthogonalEigensystem: Sorted by (Re E, Im E)

    Raises:
        DegenerateError: If either amplitude is zero

    Example:
        >>> hn_analytic_spectrum(0.5, 2, 3).eigenvalues.real.round(6)
        array([-1.414214,  0.      ,  1.414214])
    '''
    t_left, t_right = complex(t_left), complex(t_right)
    if t_left == 0 or t_right == 0:
        raise DegenerateError('Hatano-Nelson amplitudes must be nonzero')
    if n_cells < 1:
        raise ValidationError('must be a positive integer', field='N')

    ratio = np.sqrt(t_right / t_left + 0j)
    momenta = np.arange(1, n_cells + 1) * np.pi / (n_cells + 1)
    sites = np.arange(1, n_cells + 1)
    standing = np.sin(np.outer(sites, momenta))

    eigenvalues = 2 * t_left * ratio * np.cos(momenta)
    right = np.power(ratio, sites)[:, None] * standing
    left = np.power(1 / ratio.conjugate(), sites)[:, None] * standing * 2 / (n_cells + 1)

    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    right = right[:, order]
    unit = right / np.linalg.norm(right, axis=0)
    return BiorthogonalEigensystem(
        eigenvalues=eigenvalues[order],
        right=right,
        left=left[:, order],
        condition_estimate=float(1.0 / np.linalg.cond(unit)),
    )
