from dataclasses import dataclass, field, replace
from core.compat import StrEnum

import numpy as np

from core.exceptions import ValidationError


def _as_complex_tuple(values):
    return tuple(complex(value) for value in values)


@dataclass(frozen=True)
class LongRangeHop:
    '''
    Nonreciprocal hop between sublattice i of cell n and sublattice j of
    cell n + m.

    Attributes:
        i: Source sublattice, 1-based
        j: Target sublattice, 1-based
        m: Cell offset (>= 1)
        t_right: Forward amplitude, (n, i) -> (n + m, j)
        t_left: Backward amplitude, (n + m, j) -> (n, i)
    '''

    i: int
    j: int
    m: int
    t_right: complex
    t_left: complex

    def __post_init__(self):
        object.__setattr__(self, 't_right', complex(self.t_right))
        object.__setattr__(self, 't_left', complex(self.t_left))

    def displacement(self, n_sub):
        '''Site-index distance covered by the hop in a chain of n_sub-site cells.'''
        return self.m * n_sub + (self.j - self.i)

    def transposed(self):
        return replace(self, t_right=self.t_left, t_left=self.t_right)


@dataclass(frozen=True)
class LatticeModel1D:
    '''
    One-dimensional chain of n_cells unit cells with n_sub sublattices each.

    Nearest-neighbour hops connect site s to s + 1 (0-based, row-major in
    cells). The hop leaving sublattice i rightwards has amplitude
    t_right[i - 1], the reverse hop t_left[i - 1]; index n_sub is the
    intercell bond.

    Attributes:
        n_sub: Sublattices per unit cell (M)
        n_cells: Number of unit cells (N)
        t_right: M rightward amplitudes t_R1..t_RM
        t_left: M leftward amplitudes t_L1..t_LM
        long_range: Extra hops beyond nearest neighbours
        boundary: Open or periodic boundary

    Validation:
        - len(t_right) == len(t_left) == n_sub
        - long-range hops reference sublattices in [1, n_sub] with m >= 1

    Example:
        hatano_nelson = LatticeModel1D(
            n_sub=1, n_cells=40, t_right=(0.35,), t_left=(0.25,)
        )
    '''

    class Boundary(StrEnum):
        '''Boundary condition: OBC for open, PBC for periodic.'''
        OBC = 'obc'
        PBC = 'pbc'

    n_sub: int
    n_cells: int
    t_right: tuple
    t_left: tuple
    long_range: tuple = ()
    boundary: Boundary = Boundary.OBC

    def __post_init__(self):
        object.__setattr__(self, 't_right', _as_complex_tuple(self.t_right))
        object.__setattr__(self, 't_left', _as_complex_tuple(self.t_left))
        object.__setattr__(self, 'long_range', tuple(self.long_range))
        object.__setattr__(self, 'boundary', self.Boundary(self.boundary))
        self.clean()

    def clean(self):
        '''
        Check structural invariants.

        Raises:
            ValidationError: With one entry per offending field
        '''
        errors = {}
        if self.n_sub < 1:
            errors.setdefault('M', []).append('must be a positive integer')
        if self.n_cells < 1:
            errors.setdefault('N', []).append('must be a positive integer')
        for name, values in (('tR', self.t_right), ('tL', self.t_left)):
            if len(values) != self.n_sub:
                errors.setdefault(name, []).append(
                    f'expected {self.n_sub} entries, got {len(values)}'
                )
        for index, hop in enumerate(self.long_range):
            key = f'long_range[{index}]'
            if not (1 <= hop.i <= self.n_sub and 1 <= hop.j <= self.n_sub):
                errors.setdefault(key, []).append(
                    f'sublattice indices must lie in [1, {self.n_sub}]'
                )
            if hop.m < 1:
                errors.setdefault(key, []).append('cell offset m must be >= 1')
            elif hop.displacement(self.n_sub) == 0:
                errors.setdefault(key, []).append('hop must connect distinct sites')
        if errors:
            raise ValidationError(errors)

    @property
    def size(self):
        return self.n_sub * self.n_cells

    @property
    def is_real(self):
        amplitudes = self.t_right + self.t_left
        for hop in self.long_range:
            amplitudes += (hop.t_right, hop.t_left)
        return all(value.imag == 0 for value in amplitudes)

    @property
    def has_zero_hop(self):
        if any(value == 0 for value in self.t_right + self.t_left):
            return True
        return any(hop.t_right == 0 or hop.t_left == 0 for hop in self.long_range)

    def site(self, cell, sublattice):
        '''0-based site index of (cell, sublattice), both 1-based.'''
        return (cell - 1) * self.n_sub + (sublattice - 1)

    def transposed(self):
        '''Model with every hop reversed; its matrix is the transpose.'''
        return replace(
            self,
            t_right=self.t_left,
            t_left=self.t_right,
            long_range=tuple(hop.transposed() for hop in self.long_range),
        )

    def with_boundary(self, boundary):
        return replace(self, boundary=boundary)


@dataclass(frozen=True, eq=False)
class BlochMatrix:
    '''
    Laurent-polynomial matrix H(beta) = sum_m T_m beta^(-m).

    blocks[m][j, i] is the amplitude from sublattice i of cell n to
    sublattice j of cell n + m. Absent offsets are zero.
    '''

    n_sub: int
    blocks: dict = field(default_factory=dict)

    @property
    def p(self):
        return max((abs(offset) for offset in self.blocks), default=0)

    @property
    def p_forward(self):
        return max((offset for offset in self.blocks if offset > 0), default=0)

    @property
    def p_backward(self):
        return max((-offset for offset in self.blocks if offset < 0), default=0)

    @property
    def is_balanced(self):
        return self.p_forward == self.p_backward

    def block(self, offset):
        if offset in self.blocks:
            return self.blocks[offset]
        return np.zeros((self.n_sub, self.n_sub), dtype=complex)


@dataclass(frozen=True)
class LatticeModel2D:
    '''
    Square lattice of n_cols x n_rows sites with nonreciprocal hops.

    Attributes:
        n_cols: Columns (Mx)
        n_rows: Rows (Ny)
        t_right, t_left: Hops along +x / -x
        t_up, t_down: Hops along +y / -y
        t1: Diagonal hop (m, n) -> (m + 1, n + 1)
        t2: Reverse diagonal hop
    '''

    n_cols: int
    n_rows: int
    t_right: complex
    t_left: complex
    t_up: complex
    t_down: complex
    t1: complex = 0j
    t2: complex = 0j

    def __post_init__(self):
        for name in ('t_right', 't_left', 't_up', 't_down', 't1', 't2'):
            object.__setattr__(self, name, complex(getattr(self, name)))
        errors = {}
        if self.n_cols < 2:
            errors['Mx'] = ['must be at least 2']
        if self.n_rows < 2:
            errors['Ny'] = ['must be at least 2']
        if errors:
            raise ValidationError(errors)

    @property
    def size(self):
        return self.n_cols * self.n_rows

    @property
    def has_diagonal(self):
        return self.t1 != 0 or self.t2 != 0

    @property
    def is_real(self):
        amplitudes = (
            self.t_right, self.t_left, self.t_up, self.t_down, self.t1, self.t2,
        )
        return all(value.imag == 0 for value in amplitudes)

    @property
    def has_zero_hop(self):
        axis_hops = (self.t_right, self.t_left, self.t_up, self.t_down)
        if any(value == 0 for value in axis_hops):
            return True
        return (self.t1 == 0) != (self.t2 == 0)

    def site(self, column, row):
        '''0-based site index of (column, row), both 1-based.'''
        return (row - 1) * self.n_cols + (column - 1)

    def transposed(self):
        return replace(
            self,
            t_right=self.t_left,
            t_left=self.t_right,
            t_up=self.t_down,
            t_down=self.t_up,
            t1=self.t2,
            t2=self.t1,
        )
