'''
Path-independence of hopping ratios on finite hopping graphs.

Every bond a <-> b carries the ratio t(a -> b) / t(b -> a). A diagonal
gauge exists iff the product of ratios around every cycle is one, which is
checked by propagating squared site scales along a breadth-first spanning
tree and testing each remaining bond against them.
'''

import logging
from collections import deque

import numpy as np

from core import settings
from lattice.hamiltonians import build_real_space, build_real_space_2d
from lattice.models import LatticeModel1D, LatticeModel2D

from .models import GaugeGrid2D, GaugeReport

logger = logging.getLogger(__name__)


def _hopping_matrix(model):
    if isinstance(model, LatticeModel2D):
        return build_real_space_2d(model)
    return build_real_space(model.with_boundary(LatticeModel1D.Boundary.OBC))


def _bonds(hamiltonian):
    '''
    Collect bonds a < b with their forward ratio.

    Returns:
        tuple: (bonds, degenerate) where bonds maps (a, b) -> t(a->b)/t(b->a)
    '''
    rows, columns = np.nonzero(hamiltonian)
    bonds = {}
    degenerate = False
    for row, column in zip(rows.tolist(), columns.tolist()):
        if row == column:
            continue
        a, b = min(row, column), max(row, column)
        if (a, b) in bonds:
            continue
        forward = hamiltonian[b, a]
        backward = hamiltonian[a, b]
        if forward == 0 or backward == 0:
            degenerate = True
            continue
        bonds[(a, b)] = forward / backward
    return bonds, degenerate


def _ratio(bonds, source, target):
    if source < target:
        return bonds[(source, target)]
    return 1 / bonds[(target, source)]


def _tree_path(parent, site):
    path = [site]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def _fundamental_cycle(parent, a, b):
    '''Edges of the cycle closed by the non-tree bond (a, b).'''
    path_a = _tree_path(parent, a)
    path_b = _tree_path(parent, b)
    on_b = set(path_b)
    common = next(site for site in path_a if site in on_b)
    up = path_a[:path_a.index(common) + 1]
    down = path_b[:path_b.index(common)][::-1]
    walk = up + down + [a]
    return [(walk[index], walk[index + 1]) for index in range(len(walk) - 1)]


def _spanning_forest(bonds, size, root=0):
    '''
    Breadth-first spanning forest of the bond graph.

    Returns:
        tuple: (parent, order) where parent[root] is None for every tree
        root and order lists sites with each parent before its children
    '''
    neighbours = {site: [] for site in range(size)}
    for a, b in bonds:
        neighbours[a].append(b)
        neighbours[b].append(a)
    for site in neighbours:
        neighbours[site].sort()

    parent = {}
    order = []
    for start in [root] + [site for site in range(size) if site != root]:
        if start in parent:
            continue
        parent[start] = None
        order.append(start)
        queue = deque([start])
        while queue:
            site = queue.popleft()
            for neighbour in neighbours[site]:
                if neighbour in parent:
                    continue
                parent[neighbour] = site
                order.append(neighbour)
                queue.append(neighbour)
    return parent, order


def modulus_grading(hamiltonian):
    '''
    Diagonal S for which S⁻¹HS has |t(a -> b)| = |t(b -> a)| on every tree bond.

    Works on any square matrix; one-way hops are ignored. For a
    path-independent model this is the modulus of the imaginary gauge
    transformation, so skin modes become extended in the graded basis.

    Args:
        hamiltonian: Square matrix, entry (b, a) is the hop a -> b

    Returns:
        numpy.ndarray: Positive scales, geometric mean of extremes equal to one

    Example:
        >>> modulus_grading(build_real_space(hatano_nelson(0.5, 2, 3)))
        array([0.5, 1. , 2. ])
    '''
    matrix = np.asarray(hamiltonian)
    size = matrix.shape[0]
    bonds, _ = _bonds(matrix)
    parent, order = _spanning_forest(bonds, size)

    logs = np.zeros(size)
    for site in order:
        if parent[site] is not None:
            logs[site] = logs[parent[site]] + 0.5 * np.log(abs(_ratio(bonds, parent[site], site)))
    return np.exp(logs - 0.5 * (logs.max() + logs.min()))


def check_path_independence(model, root=0, tol=None):
    '''
    Check that hopping ratios are path independent on the open-boundary graph.

    Args:
        model: LatticeModel1D or LatticeModel2D (1D models are checked under OBC)
        root: 0-based site where the breadth-first spanning tree starts
        tol: Relative tolerance on modulus and phase of cycle products

    Returns:
        GaugeReport: Status, squared site scales when consistent, and the
        shortest violating cycle otherwise

    Example:
        >>> str(check_path_independence(third_neighbour_chain(0.25, 0.35, 0.1, 8)).status)
        'HERMITIZABLE'
    '''
    tol = settings.CYCLE_TOL if tol is None else tol
    if model.has_zero_hop:
        return GaugeReport(status=GaugeReport.Status.DEGENERATE)

    hamiltonian = _hopping_matrix(model)
    size = hamiltonian.shape[0]
    bonds, degenerate = _bonds(hamiltonian)
    if degenerate:
        return GaugeReport(status=GaugeReport.Status.DEGENERATE)

    parent, order = _spanning_forest(bonds, size, root)
    potentials = {}
    for site in order:
        if parent[site] is None:
            potentials[site] = 1.0 + 0j
        else:
            potentials[site] = potentials[parent[site]] * _ratio(bonds, parent[site], site)

    max_residual = 0.0
    violating = []
    for (a, b), ratio in bonds.items():
        if parent[b] == a or parent[a] == b:
            continue
        mismatch = potentials[b] / (potentials[a] * ratio)
        residual = max(abs(abs(mismatch) - 1), abs(np.angle(mismatch)))
        max_residual = max(max_residual, residual)
        if residual > tol:
            violating.append((a, b))

    if violating:
        cycles = [_fundamental_cycle(parent, a, b) for a, b in violating]
        shortest = min(cycles, key=len)
        logger.info(
            'Path independence violated on %d bonds, residual %.3g',
            len(violating), max_residual,
        )
        return GaugeReport(
            status=GaugeReport.Status.VIOLATED,
            violating_cycle=[(a + 1, b + 1) for a, b in shortest],
            max_cycle_residual=max_residual,
        )

    ratios = np.array(list(bonds.values()), dtype=complex)
    real = np.all(np.abs(ratios.imag) <= tol * np.abs(ratios))
    if real and np.all(ratios.real > 0):
        status = GaugeReport.Status.HERMITIZABLE
    elif real:
        status = GaugeReport.Status.ETA_I_PSEUDO
    else:
        status = GaugeReport.Status.COMPLEX_SCALABLE

    return GaugeReport(
        status=status,
        site_potentials={site + 1: value for site, value in sorted(potentials.items())},
        max_cycle_residual=max_residual,
    )


def solve_gauge_2d(model, tol=None):
    '''
    Gauge factors r_x^m · r_y^n of a path-independent 2D lattice.

    Args:
        model: LatticeModel2D

    Returns:
        GaugeGrid2D: r_x = √(t_R/t_L), r_y = √(t_U/t_D) and the site grid

    Raises:
        DegenerateError: If a hop is zero
        GaugeViolationError: If the diagonal hops break path independence
    '''
    check_path_independence(model, tol=tol).raise_for_status()

    r_x = np.sqrt(model.t_right / model.t_left + 0j)
    r_y = np.sqrt(model.t_up / model.t_down + 0j)
    columns = np.power(r_x, np.arange(1, model.n_cols + 1))
    rows = np.power(r_y, np.arange(1, model.n_rows + 1))

    products = (model.t_right * model.t_left, model.t_up * model.t_down)
    if any(value.imag != 0 or value.real <= 0 for value in products):
        logger.warning('Axis hop products are not all positive; no Hermitian counterpart')

    return GaugeGrid2D(r_x=complex(r_x), r_y=complex(r_y), factors=np.outer(rows, columns))
