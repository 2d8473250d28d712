'''Factories for the reference models used across the project.'''

from dataclasses import replace

import numpy as np

from .models import LatticeModel1D, LatticeModel2D, LongRangeHop


def hatano_nelson(t_left, t_right, n_cells, boundary=LatticeModel1D.Boundary.OBC):
    return LatticeModel1D(
        n_sub=1,
        n_cells=n_cells,
        t_right=(t_right,),
        t_left=(t_left,),
        boundary=boundary,
    )


def ssh3(t_left, t_right, n_cells, boundary=LatticeModel1D.Boundary.OBC):
    '''
    Trimer chain with three sublattices per cell.

    Args:
        t_left: (t_L1, t_L2, t_L3)
        t_right: (t_R1, t_R2, t_R3)
        n_cells: Number of unit cells
    '''
    return LatticeModel1D(
        n_sub=3,
        n_cells=n_cells,
        t_right=tuple(t_right),
        t_left=tuple(t_left),
        boundary=boundary,
    )


def ssh3_representative(x, y, t3, n_cells):
    '''
    SSH3 chain realising t_L1·t_R1 = x·t3² and t_L2·t_R2 = y·t3².

    Uses t_R1 = t_R2 = 1 and a symmetric intercell hop t3; any other set
    with the same products is related to it by an imaginary gauge
    transformation.
    '''
    return ssh3(
        t_left=(x * t3 ** 2, y * t3 ** 2, t3),
        t_right=(1.0, 1.0, t3),
        n_cells=n_cells,
    )


def third_neighbour_chain(t_left, t_right, t_right_prime, n_cells, shift=0.0):
    '''
    Single-band chain with an extra hop between cells n and n + 3.

    The backward long-range amplitude t_R'·(t_L/t_R)³ keeps the product of
    hopping ratios path independent; shift is added to it to break the
    condition.
    '''
    t_left_prime = t_right_prime * (t_left / t_right) ** 3 + shift
    return LatticeModel1D(
        n_sub=1,
        n_cells=n_cells,
        t_right=(t_right,),
        t_left=(t_left,),
        long_range=(LongRangeHop(1, 1, 3, t_right_prime, t_left_prime),),
    )


def diagonal_hn2d(t_left, t_right, t_down, t_up, t1, n_cols, n_rows):
    '''2D HN lattice whose reverse diagonal t2 = t1·t_D·t_L/(t_U·t_R) keeps it gauge consistent.'''
    t2 = t1 * (t_down * t_left) / (t_up * t_right)
    return LatticeModel2D(
        n_cols=n_cols,
        n_rows=n_rows,
        t_right=t_right,
        t_left=t_left,
        t_up=t_up,
        t_down=t_down,
        t1=t1,
        t2=t2,
    )


def random_nn_model(rng, n_sub, n_cells, low=-2.0, high=2.0, min_modulus=0.05):
    '''
    Draw a nearest-neighbour model with real amplitudes in [low, high].

    Amplitudes with modulus below min_modulus are redrawn.
    '''
    def draw():
        values = rng.uniform(low, high, size=n_sub)
        while np.any(np.abs(values) < min_modulus):
            small = np.abs(values) < min_modulus
            values[small] = rng.uniform(low, high, size=int(small.sum()))
        return tuple(values)

    return LatticeModel1D(
        n_sub=n_sub,
        n_cells=n_cells,
        t_right=draw(),
        t_left=draw(),
    )


def with_random_phases(model, rng):
    '''Copy of a nearest-neighbour model with a random phase on every amplitude.'''
    def decorate(values):
        angles = rng.uniform(0, 2 * np.pi, size=len(values))
        return tuple(np.asarray(values) * np.exp(1j * angles))

    return replace(
        model,
        t_right=decorate(model.t_right),
        t_left=decorate(model.t_left),
    )
