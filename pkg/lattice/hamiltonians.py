'''
Real-space and generalized Bloch Hamiltonians.

Matrix convention: entry (b, a) holds the amplitude of the hop a -> b, so a
rightward hop t_R sits below the diagonal.
'''

import logging

import numpy as np

from core.exceptions import ValidationError

from .models import BlochMatrix, LatticeModel1D

logger = logging.getLogger(__name__)


def build_real_space(model):
    '''
    Assemble the NM x NM Hamiltonian of a 1D chain.

    Nearest-neighbour bonds are s -> s + 1 with amplitude t_right[s mod M];
    long-range hops are superposed additively. Under PBC the last bond and
    any long-range hop leaving the chain wrap modulo NM.

    Args:
        model: LatticeModel1D

    Returns:
        numpy.ndarray: Complex (NM, NM) matrix

    Example:
        >>> model = LatticeModel1D(1, 3, (2,), (0.5,))
        >>> build_real_space(model).real
        array([[0. , 0.5, 0. ],
               [2. , 0. , 0.5],
               [0. , 2. , 0. ]])
    '''
    size = model.size
    periodic = model.boundary == LatticeModel1D.Boundary.PBC
    hamiltonian = np.zeros((size, size), dtype=complex)

    for source in range(size - 1):
        bond = source % model.n_sub
        hamiltonian[source + 1, source] += model.t_right[bond]
        hamiltonian[source, source + 1] += model.t_left[bond]
    if periodic:
        hamiltonian[0, size - 1] += model.t_right[-1]
        hamiltonian[size - 1, 0] += model.t_left[-1]

    for hop in model.long_range:
        shift = hop.displacement(model.n_sub)
        for cell in range(1, model.n_cells + 1):
            source = model.site(cell, hop.i)
            target = source + shift
            if target >= size:
                if not periodic:
                    continue
                target %= size
            hamiltonian[target, source] += hop.t_right
            hamiltonian[source, target] += hop.t_left

    logger.debug('Assembled %s chain of %d sites', model.boundary, size)
    return hamiltonian


def hopping_blocks(model):
    '''
    Split a 1D model into the blocks T_m of its generalized Bloch Hamiltonian.

    Returns:
        BlochMatrix: T_0 for intracell hops, T_(+1)[0, M-1] = t_RM,
        T_(-1)[M-1, 0] = t_LM, and one forward/backward pair per long-range hop
    '''
    n_sub = model.n_sub
    blocks = {}

    def add(offset, row, column, amplitude):
        if amplitude == 0:
            return
        if offset not in blocks:
            blocks[offset] = np.zeros((n_sub, n_sub), dtype=complex)
        blocks[offset][row, column] += amplitude

    for bond in range(n_sub - 1):
        add(0, bond + 1, bond, model.t_right[bond])
        add(0, bond, bond + 1, model.t_left[bond])
    add(1, 0, n_sub - 1, model.t_right[-1])
    add(-1, n_sub - 1, 0, model.t_left[-1])

    for hop in model.long_range:
        # Normalise so the target sublattice lies inside one cell
        target = (hop.i - 1) + hop.displacement(n_sub)
        offset, sublattice = divmod(target, n_sub)
        add(offset, sublattice, hop.i - 1, hop.t_right)
        add(-offset, hop.i - 1, sublattice, hop.t_left)

    return BlochMatrix(n_sub=n_sub, blocks=blocks)


def bloch_eval(bloch_matrix, beta):
    '''
    Evaluate H(beta) = sum_m T_m beta^(-m).

    Raises:
        ValidationError: If beta is zero
    '''
    beta = complex(beta)
    if beta == 0:
        raise ValidationError('H(beta) is undefined at beta = 0', field='beta')
    matrix = np.zeros((bloch_matrix.n_sub, bloch_matrix.n_sub), dtype=complex)
    for offset, block in bloch_matrix.blocks.items():
        matrix += block * beta ** (-offset)
    return matrix


def build_real_space_2d(model):
    '''
    Assemble the open-boundary Hamiltonian of the 2D square lattice.

    Sites are indexed row-major, s = (n - 1)·Mx + (m - 1) for column m and
    row n. x-bonds carry t_right / t_left, y-bonds t_up / t_down, and the
    diagonal (m, n) -> (m + 1, n + 1) carries t1 forward and t2 back.
    '''
    n_cols, n_rows = model.n_cols, model.n_rows
    hamiltonian = np.zeros((model.size, model.size), dtype=complex)

    bonds = (
        (1, 0, model.t_right, model.t_left),
        (0, 1, model.t_up, model.t_down),
        (1, 1, model.t1, model.t2),
    )
    for step_x, step_y, forward, backward in bonds:
        if forward == 0 and backward == 0:
            continue
        for row in range(1, n_rows + 1 - step_y):
            for column in range(1, n_cols + 1 - step_x):
                source = model.site(column, row)
                target = model.site(column + step_x, row + step_y)
                hamiltonian[target, source] += forward
                hamiltonian[source, target] += backward

    return hamiltonian
