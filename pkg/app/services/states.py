"""
Input-state generators.

Every state is returned as the vector entering the first beam splitter. The
NOON state lives between the beam splitters, so its generator undoes BS_+.
"""
import logging
import math

import numpy as np
from scipy import linalg

from app.config import settings
from app.models.errors import InvalidInputError, NumericError
from app.models.schemas import IntelligentSpec, JState, StateFamily
from app.services import su2

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


def _check_size(two_j: int) -> None:
    if two_j < 1:
        raise InvalidInputError(f"Photon number must be at least 1, got {two_j}")
    if two_j > settings.N_MAX:
        raise InvalidInputError(f"N = {two_j} exceeds the supported maximum {settings.N_MAX}")


def yurke_state(two_j: int) -> JState:
    """(|j,0> + |j,1>)/sqrt(2)."""
    _check_size(two_j)
    su2.require_even(two_j, "The Yurke state")
    j = two_j // 2
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[j] = amps[j + 1] = 1 / math.sqrt(2)
    return JState.from_unnormalized(two_j, amps)


def dual_fock_state(two_j: int) -> JState:
    """|j,0> = |j>_a |j>_b."""
    _check_size(two_j)
    su2.require_even(two_j, "The dual-Fock state")
    return su2.basis_state(two_j, 0)


def noon_state(two_j: int) -> JState:
    """(|j,j> + |j,-j>)/sqrt(2), the state inside the interferometer."""
    _check_size(two_j)
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return JState(two_j=two_j, amps=amps)


def noon_equivalent_input(two_j: int) -> JState:
    """Input that BS_+ turns into the NOON state: e^{+i(pi/2)J_x}|NOON>."""
    rotated = su2.rotate_x(noon_state(two_j), -math.pi / 2)
    return JState.from_unnormalized(two_j, rotated.amps)


def single_port_fock(two_j: int) -> JState:
    """|N>_a |0>_b = |j,j>, the uncorrelated reference input."""
    _check_size(two_j)
    return su2.basis_state(two_j, two_j / 2)


def intelligent_operator(two_j: int, eta: float) -> np.ndarray:
    """J_y + i*eta*J_z."""
    return su2.jy_matrix(two_j) + 1j * eta * su2.jz_matrix(two_j)


def intelligent_eigenvalue(spec: IntelligentSpec) -> complex:
    return 1j * spec.m0 * math.sqrt(spec.eta**2 - 1)


def _recurrence_amplitudes(spec: IntelligentSpec, beta: complex) -> np.ndarray:
    """
    Solve the tridiagonal eigen-equation row by row from k = -j.

    Row k reads -i a_{k-1}/2 C_{k-1} + i eta k C_k + i a_k/2 C_{k+1} = beta C_k
    with a_k = sqrt((j-k)(j+k+1)).
    """
    j = spec.two_j / 2
    ks = su2.m_values(spec.two_j)
    ladder = np.sqrt((j - ks) * (j + ks + 1))
    amps = np.zeros(spec.two_j + 1, dtype=complex)
    amps[0] = 1.0
    for p in range(spec.two_j):
        previous = amps[p - 1] * 0.5j * ladder[p - 1] if p > 0 else 0.0
        amps[p + 1] = ((beta - 1j * spec.eta * ks[p]) * amps[p] + previous) / (0.5j * ladder[p])
        if not np.isfinite(amps[p + 1]):
            raise NumericError(
                f"Intelligent-state recurrence overflowed at k = {ks[p + 1]} "
                f"(N = {spec.two_j}, eta = {spec.eta})"
            )
        # rescale to keep the running vector representable
        peak = np.max(np.abs(amps[: p + 2]))
        if peak > 1e150:
            amps /= peak
    return amps / np.linalg.norm(amps)


def _inverse_iteration(matrix: np.ndarray, beta: complex, start: np.ndarray, steps: int = 3) -> np.ndarray:
    scale = max(np.linalg.norm(matrix, 2), 1.0)
    shifted = matrix - (beta + 1e-13 * scale) * np.eye(matrix.shape[0])
    lu = linalg.lu_factor(shifted)
    vec = start
    for _ in range(steps):
        vec = linalg.lu_solve(lu, vec)
        vec = vec / np.linalg.norm(vec)
    return vec


def intelligent_residual(spec: IntelligentSpec, amps: np.ndarray) -> float:
    """||(J_y + i eta J_z - beta) C||_2 relative to ||J_y + i eta J_z||_2."""
    matrix = intelligent_operator(spec.two_j, spec.eta)
    beta = intelligent_eigenvalue(spec)
    return float(np.linalg.norm(matrix @ amps - beta * amps) / np.linalg.norm(matrix, 2))


def intelligent_state(spec: IntelligentSpec) -> JState:
    """
    Eigenvector of J_y + i*eta*J_z with eigenvalue i*m0*sqrt(eta^2 - 1).

    Built by the three-term recurrence; when cancellation spoils the residual
    the vector is polished by shifted inverse iteration.

    Raises:
        NumericError: If neither route meets the residual tolerance.
    """
    _check_size(spec.two_j)
    beta = intelligent_eigenvalue(spec)
    amps = _recurrence_amplitudes(spec, beta)
    residual = intelligent_residual(spec, amps)

    if residual >= RESIDUAL_TOL:
        logger.debug(f"Recurrence residual {residual:.3e}, polishing by inverse iteration")
        matrix = intelligent_operator(spec.two_j, spec.eta)
        amps = _inverse_iteration(matrix, beta, amps)
        residual = intelligent_residual(spec, amps)

    if residual >= RESIDUAL_TOL or not np.all(np.isfinite(amps)):
        raise NumericError(
            f"Intelligent state (N={spec.two_j}, m0={spec.m0}, eta={spec.eta}) "
            f"has residual {residual:.3e}"
        )
    return JState.from_unnormalized(spec.two_j, amps)


def resolve_eta(eta: float | None) -> float:
    """Default eta, with eta = 1 mapped just above 1."""
    if eta is None:
        return settings.DEFAULT_ETA
    if eta == 1.0:
        return settings.ETA_ONE_SUBSTITUTE
    return eta


def build_state(
    family: StateFamily,
    n_photons: int,
    eta: float | None = None,
    m0: float | None = None,
) -> JState:
    """Construct the input state for one family."""
    if family == StateFamily.YURKE:
        return yurke_state(n_photons)
    if family == StateFamily.DUAL_FOCK:
        return dual_fock_state(n_photons)
    if family == StateFamily.NOON:
        return noon_equivalent_input(n_photons)
    if family == StateFamily.SINGLE_PORT:
        return single_port_fock(n_photons)
    resolved = resolve_eta(eta)
    if eta is not None and resolved != eta:
        logger.warning(f"eta = {eta} is degenerate; using eta = {resolved}")
    try:
        spec = IntelligentSpec(
            two_j=n_photons,
            m0=settings.DEFAULT_M0 if m0 is None else m0,
            eta=resolved,
        )
    except ValueError as e:
        raise InvalidInputError(str(e)) from e
    return intelligent_state(spec)


def state_label(family: StateFamily, eta: float | None = None, m0: float | None = None) -> str:
    """
    Short label used in CSV rows, e.g. 'intelligent(eta=10,m0=0)'.

    Carries the eta actually used, so a requested eta = 1 shows as 1.000001.
    """
    if family != StateFamily.INTELLIGENT:
        return family.value
    eta = resolve_eta(eta)
    m0 = settings.DEFAULT_M0 if m0 is None else m0
    return f"intelligent(eta={eta:.10g},m0={m0:g})"
