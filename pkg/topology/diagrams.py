'''
Phase diagram of the SSH3 chain over the intracell hopping products.
'''

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from core import settings
from core.exceptions import NumericalError, ValidationError
from lattice.hamiltonians import build_real_space
from lattice.presets import ssh3_representative
from spectral.eigen import eig_full
from spectral.phases import classify_spectrum

from .models import PhaseDiagramCell, PhaseDiagramGrid
from .zak import compute_ns_zak

logger = logging.getLogger(__name__)

DEGENERATE = 'DEGENERATE'
UNRESOLVED = 'UNRESOLVED'

# Grid coordinates closer than this to an axis sit on an EP line
AXIS_TOL = 1e-12


def _compute_cell(x, y, t3, n_cells, K):
    if abs(x) < AXIS_TOL or abs(y) < AXIS_TOL:
        return PhaseDiagramCell(x=x, y=y, pt_phase=DEGENERATE)

    model = ssh3_representative(x, y, t3, n_cells)
    try:
        phase = classify_spectrum(eig_full(build_real_space(model)).eigenvalues).phase
    except NumericalError as error:
        logger.warning('Unresolved PT phase at (%.4g, %.4g): %s', x, y, error)
        phase = UNRESOLVED
    try:
        count = compute_ns_zak(model, K=K).total
    except NumericalError as error:
        logger.debug('Transition cell at (%.4g, %.4g): %s', x, y, error)
        count = None
    return PhaseDiagramCell(x=x, y=y, edge_count=count, pt_phase=str(phase))


def _neighbour_counts(cells, columns, rows, column, row):
    counts = set()
    for step_column, step_row in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        other_column, other_row = column + step_column, row + step_row
        if 0 <= other_column < columns and 0 <= other_row < rows:
            count = cells[other_row * columns + other_column].edge_count
            if count is not None:
                counts.add(count)
    return tuple(sorted(counts))


def phase_diagram(
    t3,
    x_range=(-2.0, 2.0),
    y_range=(-2.0, 2.0),
    resolution=21,
    n_cells=40,
    K=None,
    threads=None,
):
    '''
    Edge-state counts and PT phases over x = t_L1·t_R1/t3², y = t_L2·t_R2/t3².

    Each cell is represented by t_R1 = t_R2 = 1, t_L1 = x·t3²,
    t_L2 = y·t3² and a symmetric intercell hop t3; every other parameter set
    with the same products gives the same result. Cells on the axes are
    marked DEGENERATE; cells whose spectrum cannot be paired are UNRESOLVED. Cells where the band tracking fails sit on a
    transition and carry the counts of their neighbours instead of a count.

    Args:
        t3: Intercell hop
        x_range: (x_min, x_max)
        y_range: (y_min, y_max)
        resolution: Grid points per axis
        n_cells: Chain length used for the PT-phase label
        K: Initial samples for the Zak phase
        threads: Worker threads (settings.THREADS by default)

    Returns:
        PhaseDiagramGrid: Cells row-major, y outer

    Raises:
        ValidationError: For t3 = 0 or a resolution below 2
    '''
    if t3 == 0:
        raise ValidationError('must be nonzero', field='t3')
    if resolution < 2:
        raise ValidationError('must be at least 2', field='resolution')
    threads = settings.THREADS if threads is None else threads

    x_values = np.linspace(*x_range, resolution)
    y_values = np.linspace(*y_range, resolution)
    grid = [(float(x), float(y)) for y in y_values for x in x_values]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        cells = list(executor.map(lambda point: _compute_cell(*point, t3, n_cells, K), grid))

    for index, cell in enumerate(cells):
        if cell.is_transition:
            row, column = divmod(index, resolution)
            adjacent = _neighbour_counts(cells, resolution, resolution, column, row)
            cells[index] = PhaseDiagramCell(
                x=cell.x, y=cell.y, pt_phase=cell.pt_phase, adjacent_counts=adjacent
            )

    transitions = sum(cell.is_transition for cell in cells)
    logger.info('Phase diagram at t3 = %.4g: %d cells, %d transitions', t3, len(cells), transitions)
    return PhaseDiagramGrid(t3=t3, x_values=x_values, y_values=y_values, cells=cells)
