import logging

import numpy as np

from core import settings
from core.exceptions import (
    DegenerateError,
    PTBrokenError,
    SymmetryAbsentError,
    UnsupportedModelError,
    ValidationError,
)
from lattice.hamiltonians import build_real_space
from lattice.models import BlochMatrix, LatticeModel1D

from .models import EtaMetric, IgtScaling
from .paths import check_path_independence

logger = logging.getLogger(__name__)


def _require_nonzero_hops(model):
    if model.has_zero_hop:
        raise DegenerateError('a hop amplitude is zero; the gauge transformation is singular')


def _require_path_independence(model):
    if model.long_range:
        check_path_independence(model).raise_for_status()


def nn_gauge_ratios(model):
    '''
    Cumulative gauge ratios r_0..r_M of the nearest-neighbour bonds.

    r_i is the principal square root of (t_R1···t_Ri)/(t_L1···t_Li), so a
    negative cumulative ratio gives a purely imaginary r_i.

    Returns:
        numpy.ndarray: M + 1 complex values with r_0 = 1

    Raises:
        DegenerateError: If any nearest-neighbour amplitude is zero
    '''
    t_right = np.asarray(model.t_right, dtype=complex)
    t_left = np.asarray(model.t_left, dtype=complex)
    if np.any(t_right == 0) or np.any(t_left == 0):
        raise DegenerateError('a nearest-neighbour amplitude is zero')
    cumulative = np.cumprod(t_right / t_left)
    # Adding 0j clears signed zeros so negative ratios take the +i branch
    return np.concatenate(([1.0 + 0j], np.sqrt(cumulative + 0j)))


def build_igt(model):
    '''
    Diagonal gauge transformation S of a 1D chain.

    Returns:
        IgtScaling: cell_factor r_M and sub_factors (r_0, ..., r_(M-1))

    Example:
        >>> build_igt(hatano_nelson(0.5, 2, 3)).diag.real
        array([2., 4., 8.])
    '''
    ratios = nn_gauge_ratios(model)
    return IgtScaling(
        cell_factor=complex(ratios[-1]),
        sub_factors=tuple(ratios[:-1]),
        n_cells=model.n_cells,
    )


def build_eta_i(model):
    '''
    Metric η_I = S⁻² written through the products R_i = Π t_L / Π t_R.

    Using the products directly keeps η_I real even when some r_i is
    imaginary.

    Returns:
        EtaMetric: Diagonal R_(i-1) · R_M^n and its definiteness

    Raises:
        UnsupportedModelError: For complex amplitudes (η_I would not be Hermitian)
        DegenerateError: For zero amplitudes
        GaugeViolationError: If long-range hops break path independence
    '''
    if not model.is_real:
        raise UnsupportedModelError('η_I is Hermitian only for real hopping amplitudes')
    _require_nonzero_hops(model)
    _require_path_independence(model)

    t_right = np.real(np.asarray(model.t_right))
    t_left = np.real(np.asarray(model.t_left))
    products = np.cumprod(t_left / t_right)
    sub = np.concatenate(([1.0], products[:-1]))
    cells = np.power(products[-1], np.arange(1, model.n_cells + 1))
    diag = np.outer(cells, sub).ravel()

    if np.all(products > 0):
        definiteness = EtaMetric.Definiteness.POSITIVE_DEFINITE
    else:
        definiteness = EtaMetric.Definiteness.INDEFINITE
    return EtaMetric(diag=diag, definiteness=definiteness)


def pseudo_hermiticity_residual(hamiltonian, eta):
    '''
    Frobenius norm of η·H − Hᴴ·η.

    Args:
        hamiltonian: Square complex matrix
        eta: Diagonal of η (1D array) or the full matrix
    '''
    hamiltonian = np.asarray(hamiltonian)
    eta = np.asarray(eta)
    size = hamiltonian.shape[0]
    if eta.shape not in ((size,), (size, size)):
        raise ValidationError(
            f'metric of shape {eta.shape} does not match a {size}x{size} Hamiltonian',
            field='eta',
        )
    adjoint = hamiltonian.conj().T
    if eta.ndim == 1:
        difference = eta[:, None] * hamiltonian - adjoint * eta[None, :]
    else:
        difference = eta @ hamiltonian - adjoint @ eta
    return float(np.linalg.norm(difference))


def hermitian_counterpart(model):
    '''
    Hermitian matrix S⁻¹ H S of a PT-exact open chain.

    Every nearest-neighbour pair becomes √(t_L·t_R) in both directions.

    Raises:
        UnsupportedModelError: For complex amplitudes or periodic chains
        PTBrokenError: If some t_L·t_R (or t_R'·t_L') is not positive
        GaugeViolationError: If long-range hops break path independence
    '''
    if not model.is_real:
        raise UnsupportedModelError('a Hermitian counterpart needs real amplitudes')
    if model.boundary != LatticeModel1D.Boundary.OBC:
        raise UnsupportedModelError('the gauge transformation applies to open chains')
    _require_nonzero_hops(model)
    products = [
        (right * left).real for right, left in zip(model.t_right, model.t_left)
    ]
    products += [(hop.t_right * hop.t_left).real for hop in model.long_range]
    if min(products) <= 0:
        raise PTBrokenError('some t_L·t_R <= 0: no Hermitian counterpart in the PT-broken phase')
    _require_path_independence(model)

    scale = build_igt(model).diag
    return build_real_space(model) * np.outer(1 / scale, scale)


def transform_blocks(bloch_matrix, scaling):
    '''
    Apply a diagonal similarity to the blocks of H(beta).

    T_m -> a^(-m) A⁻¹ T_m A with a = scaling.cell_factor and
    A = diag(scaling.sub_factors), so the roots of the characteristic
    polynomial move from beta to beta / a.

    Returns:
        BlochMatrix: Transformed blocks
    '''
    cell = complex(scaling.cell_factor)
    sub = np.asarray(scaling.sub_factors, dtype=complex)
    blocks = {
        offset: cell ** (-offset) * block * np.outer(1 / sub, sub)
        for offset, block in bloch_matrix.blocks.items()
    }
    return BlochMatrix(n_sub=bloch_matrix.n_sub, blocks=blocks)


def reflection_symmetry_generator(model, tol=None):
    '''
    Generator g = R̃ · η_I commuting with H for mirror-symmetric chains.

    With t_i = (t_Li + t_Ri)/2 and γ_i = (t_Ri − t_Li)/2 the chain maps to
    its transpose under full reflection R̃ when t_i = t_(M−i) and
    γ_i = γ_(M−i) for i = 1..M−1; combined with η_I H = Hᵀ η_I this makes g
    a symmetry.

    Args:
        model: Real open chain
        tol: Relative tolerance on the mirror condition and the commutator

    Returns:
        numpy.ndarray: Real (NM, NM) matrix g, largest entry of modulus one

    Raises:
        SymmetryAbsentError: If the mirror condition or the commutator fails
    '''
    tol = settings.SYMMETRY_TOL if tol is None else tol
    eta = build_eta_i(model)

    t_right = np.real(np.asarray(model.t_right))
    t_left = np.real(np.asarray(model.t_left))
    mean = (t_left + t_right) / 2
    asymmetry = (t_right - t_left) / 2
    scale = max(1.0, float(np.abs(t_right).max()), float(np.abs(t_left).max()))
    for index in range(1, model.n_sub):
        mirror = model.n_sub - index
        if (
            abs(mean[index - 1] - mean[mirror - 1]) > tol * scale
            or abs(asymmetry[index - 1] - asymmetry[mirror - 1]) > tol * scale
        ):
            raise SymmetryAbsentError(
                f'mirror condition fails between bonds {index} and {mirror}'
            )

    hamiltonian = build_real_space(model)
    reflection = np.fliplr(np.eye(model.size))
    generator = reflection * (eta.diag / np.abs(eta.diag).max())[None, :]
    commutator = np.linalg.norm(generator @ hamiltonian - hamiltonian @ generator)
    if commutator > tol * np.linalg.norm(hamiltonian):
        raise SymmetryAbsentError(f'generator does not commute with H ({commutator:.3g})')
    logger.debug('Reflection generator built for %d sites', model.size)
    return generator
