'''
Characteristic polynomial of the generalized Bloch Hamiltonian.

The determinant is expanded exactly over Laurent polynomials in beta, each
stored as a mapping exponent -> coefficient, so no root is lost to
numerical elimination.
'''

import logging
import math
from collections import defaultdict
from itertools import permutations

import numpy as np
from scipy import linalg

from core.exceptions import DegenerateError, SolverError, ValidationError

from .models import CharPoly

logger = logging.getLogger(__name__)

MAX_SUBLATTICES = 6

# Relative size below which an extremal coefficient counts as zero
COEFFICIENT_FLOOR = 1e-14


def _permutation_sign(permutation):
    sign = 1
    seen = [False] * len(permutation)
    for start in range(len(permutation)):
        if seen[start]:
            continue
        length = 0
        position = start
        while not seen[position]:
            seen[position] = True
            position = permutation[position]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _multiply(first, second):
    product = defaultdict(complex)
    for power_a, value_a in first.items():
        for power_b, value_b in second.items():
            product[power_a + power_b] += value_a * value_b
    return product


def _laurent_entries(bloch_matrix, energy):
    '''Entries of H(beta) - E as {exponent: coefficient}; T_m carries beta^(-m).'''
    size = bloch_matrix.n_sub
    entries = [[{} for _ in range(size)] for _ in range(size)]
    for offset, block in bloch_matrix.blocks.items():
        for row, column in zip(*np.nonzero(block)):
            entry = entries[row][column]
            entry[-offset] = entry.get(-offset, 0j) + block[row, column]
    for site in range(size):
        entries[site][site][0] = entries[site][site].get(0, 0j) - energy
    return entries


def char_poly(bloch_matrix, energy):
    '''
    Characteristic polynomial det(H(beta) - E) as an ordinary polynomial.

    Args:
        bloch_matrix: BlochMatrix with at most six sublattices
        energy: Complex energy E

    Returns:
        CharPoly: Coefficients highest power first

    Raises:
        ValidationError: For more than six sublattices
        DegenerateError: If fewer than two roots survive (a vanishing
            extremal coefficient, as at a zero hop)

    Example:
        >>> char_poly(hopping_blocks(hatano_nelson(0.5, 2, 4)), 1.0).coefficients
        array([ 0.5+0.j, -1. +0.j,  2. +0.j])
    '''
    size = bloch_matrix.n_sub
    if size > MAX_SUBLATTICES:
        raise ValidationError(
            f'determinant expansion supports at most {MAX_SUBLATTICES} sublattices', field='M'
        )
    energy = complex(energy)
    entries = _laurent_entries(bloch_matrix, energy)

    determinant = defaultdict(complex)
    for permutation in permutations(range(size)):
        term = {0: complex(_permutation_sign(permutation))}
        for row in range(size):
            entry = entries[row][permutation[row]]
            if not entry:
                break
            term = _multiply(term, entry)
        else:
            for power, value in term.items():
                determinant[power] += value

    if not determinant:
        raise DegenerateError('characteristic polynomial vanishes identically')
    lowest, highest = min(determinant), max(determinant)
    ascending = np.array(
        [determinant.get(power, 0j) for power in range(lowest, highest + 1)], dtype=complex
    )
    floor = COEFFICIENT_FLOOR * np.abs(ascending).max()
    significant = np.flatnonzero(np.abs(ascending) > floor)
    if len(significant) == 0:
        raise DegenerateError('characteristic polynomial vanishes identically')
    start, stop = significant[0], significant[-1]
    ascending = ascending[start:stop + 1]
    if len(ascending) < 3:
        raise DegenerateError(
            f'characteristic polynomial of degree {len(ascending) - 1} at E = {energy:.6g}; '
            'an extremal hopping product vanishes'
        )

    return CharPoly(
        coefficients=ascending[::-1].copy(),
        energy=energy,
        pole_order=-(lowest + int(start)),
        balanced=bloch_matrix.is_balanced,
    )


def beta_roots(polynomial):
    '''
    Roots of a characteristic polynomial sorted by (|beta|, arg beta).

    Raises:
        ValidationError: If the polynomial has degree zero
        SolverError: If the companion eigenproblem fails
    '''
    if polynomial.degree < 1:
        raise ValidationError('polynomial has no roots', field='degree')
    try:
        roots = linalg.eigvals(linalg.companion(polynomial.coefficients))
    except linalg.LinAlgError as error:
        raise SolverError(f'root finding failed at E = {polynomial.energy:.6g}') from error
    order = np.lexsort((np.angle(roots), np.abs(roots)))
    return roots[order]


def middle_pair_ranks(degree):
    '''0-based ranks of the middle-modulus pair, ceil(D/2) and ceil(D/2) + 1 counted from 1.'''
    lower = math.ceil(degree / 2) - 1
    return lower, lower + 1


def middle_roots(polynomial, tie_tol=1e-9):
    '''
    Roots at the middle-pair ranks, plus any root tied with them in modulus.

    Returns:
        numpy.ndarray: At least two roots
    '''
    roots = beta_roots(polynomial)
    moduli = np.abs(roots)
    lower, upper = middle_pair_ranks(polynomial.degree)
    selected = np.zeros(len(roots), dtype=bool)
    selected[[lower, upper]] = True
    for rank in (lower, upper):
        selected |= np.abs(moduli - moduli[rank]) <= tie_tol * moduli[rank]
    return roots[selected]
