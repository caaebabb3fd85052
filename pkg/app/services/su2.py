"""
Schwinger (two-mode) representation of SU(2).

States are stored as amplitude arrays over |j,m>, position p = m + j. Sizes
are always passed as two_j so that half-integer j never needs a float.

Conventions: rotate_y(theta) applies e^{-i theta J_y}, rotate_z applies
e^{-i theta J_z}, rotate_x applies e^{-i theta J_x}. The first beam splitter
is rotate_x(pi/2), the second rotate_x(-pi/2); together with the phase
shifter rotate_z(phi) they compose to rotate_y(phi).
"""
import logging
import math

import numpy as np

from app.models.errors import IndexRangeError, InvalidInputError
from app.models.schemas import JState, WignerBlock
from app.utils.specialfn import jacobi_recurrence, log_factorial

logger = logging.getLogger(__name__)


def _twice(value: float) -> int:
    doubled = round(2 * value)
    if abs(2 * value - doubled) > 1e-9:
        raise IndexRangeError(f"{value} is not an integer or half-integer")
    return doubled


def _check_index(two_j: int, two_m: int) -> None:
    if abs(two_m) > two_j or (two_j - two_m) % 2:
        raise IndexRangeError(f"m = {two_m / 2} is not a valid index for j = {two_j / 2}")


def _canonical_d(two_j: int, two_m: int, two_n: int, half_sin, half_cos, t):
    """d^j_{mn} for m >= |n|, where every exponent is a non-negative integer."""
    jm_plus, jm_minus = (two_j + two_m) // 2, (two_j - two_m) // 2
    jn_plus, jn_minus = (two_j + two_n) // 2, (two_j - two_n) // 2
    diff, total = (two_m - two_n) // 2, (two_m + two_n) // 2

    log_norm = 0.5 * (
        log_factorial(jm_plus) + log_factorial(jm_minus)
        - log_factorial(jn_plus) - log_factorial(jn_minus)
    )
    sign = -1.0 if diff % 2 else 1.0
    poly = jacobi_recurrence(jm_minus, diff, total, 1.0 + 2.0 * t)
    return sign * math.exp(log_norm) * half_sin**diff * half_cos**total * poly


def wigner_d(two_j: int, m: float, n: float, theta):
    """
    Rotation matrix element d^j_{mn}(theta) = <j,m| e^{-i theta J_y} |j,n>.

    Evaluated from the Jacobi-polynomial closed form in the region m >= |n|
    and mapped there by d_{mn} = (-1)^{m-n} d_{nm} = d_{-n,-m}. The
    (1 -/+ cos theta) factors enter as sin(theta/2), cos(theta/2) powers.
    theta may be a float or an array.
    """
    if two_j < 0:
        raise IndexRangeError(f"two_j must be non-negative, got {two_j}")
    two_m, two_n = _twice(m), _twice(n)
    _check_index(two_j, two_m)
    _check_index(two_j, two_n)
    return _wigner_d_twice(two_j, two_m, two_n, theta)


def _wigner_d_twice(two_j: int, two_m: int, two_n: int, theta):
    theta = np.asarray(theta, dtype=float)
    half_sin = np.sin(theta / 2)
    half_cos = np.cos(theta / 2)
    t = -half_sin**2  # (cos(theta) - 1) / 2

    sign = 1.0
    if two_m >= abs(two_n):
        pass
    elif two_n >= abs(two_m):
        sign = -1.0 if ((two_m - two_n) // 2) % 2 else 1.0
        two_m, two_n = two_n, two_m
    elif -two_m >= abs(two_n):
        sign = -1.0 if ((two_m - two_n) // 2) % 2 else 1.0
        two_m, two_n = -two_m, -two_n
    else:
        two_m, two_n = -two_n, -two_m

    value = sign * _canonical_d(two_j, two_m, two_n, half_sin, half_cos, t)
    return value if np.ndim(value) else float(value)


def wigner_block(two_j: int, theta: float) -> WignerBlock:
    """Full (2j+1)x(2j+1) matrix of d^j_{mn}(theta)."""
    size = two_j + 1
    d = np.empty((size, size))
    for p in range(size):
        for q in range(size):
            d[p, q] = _wigner_d_twice(two_j, 2 * p - two_j, 2 * q - two_j, theta)
    d.setflags(write=False)
    return WignerBlock(two_j=two_j, theta=float(theta), d=d)


def wigner_stack(two_j: int, thetas: np.ndarray) -> np.ndarray:
    """d^j(theta) for many angles at once, shape (len(thetas), 2j+1, 2j+1)."""
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    size = two_j + 1
    stack = np.empty((thetas.shape[0], size, size))
    for p in range(size):
        for q in range(size):
            stack[:, p, q] = _wigner_d_twice(two_j, 2 * p - two_j, 2 * q - two_j, thetas)
    return stack


def m_values(two_j: int) -> np.ndarray:
    return np.arange(two_j + 1) - two_j / 2


def jz_matrix(two_j: int) -> np.ndarray:
    """J_z = diag(m)."""
    return np.diag(m_values(two_j)).astype(complex)


def jplus_matrix(two_j: int) -> np.ndarray:
    """Raising operator, <j,m+1|J_+|j,m> = sqrt((j-m)(j+m+1))."""
    j = two_j / 2
    m = m_values(two_j)[:-1]
    return np.diag(np.sqrt((j - m) * (j + m + 1)), k=-1).astype(complex)


def jx_matrix(two_j: int) -> np.ndarray:
    jp = jplus_matrix(two_j)
    return 0.5 * (jp + jp.conj().T)


def jy_matrix(two_j: int) -> np.ndarray:
    jp = jplus_matrix(two_j)
    return -0.5j * (jp - jp.conj().T)


def rotate_y(state: JState, theta: float) -> JState:
    """Apply e^{-i theta J_y} through the Wigner block."""
    block = wigner_block(state.two_j, theta)
    return JState(two_j=state.two_j, amps=block.d @ state.amps)


def rotate_z(state: JState, theta: float) -> JState:
    """Apply e^{-i theta J_z}: c_m -> e^{-i theta m} c_m."""
    phases = np.exp(-1j * theta * state.m_values)
    return JState(two_j=state.two_j, amps=phases * state.amps)


def rotate_x(state: JState, theta: float) -> JState:
    """Apply e^{-i theta J_x} = e^{i(pi/2)J_z} e^{-i theta J_y} e^{-i(pi/2)J_z}."""
    turned = rotate_z(state, math.pi / 2)
    turned = rotate_y(turned, theta)
    return rotate_z(turned, -math.pi / 2)


def rotate_euler(state: JState, alpha: float, beta: float, gamma: float) -> JState:
    """General lossless beam splitter e^{-i alpha J_z} e^{-i beta J_y} e^{-i gamma J_z}."""
    return rotate_z(rotate_y(rotate_z(state, gamma), beta), alpha)


def beam_splitter_mode_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """2x2 transformation of (a, b) for the Euler-angle beam splitter."""
    return np.array([
        [np.exp(0.5j * (alpha + gamma)) * math.cos(beta / 2),
         np.exp(-0.5j * (alpha - gamma)) * math.sin(beta / 2)],
        [-np.exp(0.5j * (alpha - gamma)) * math.sin(beta / 2),
         np.exp(-0.5j * (alpha + gamma)) * math.cos(beta / 2)],
    ])


def rotation_x_matrix(two_j: int, theta: float) -> np.ndarray:
    """Matrix of e^{-i theta J_x} in the |j,m> basis."""
    m = m_values(two_j)
    d = wigner_block(two_j, theta).d
    return np.exp(0.5j * math.pi * m)[:, None] * d * np.exp(-0.5j * math.pi * m)[None, :]


def interferometer(state: JState, phi: float) -> JState:
    """BS_+ , relative phase phi, then BS_-."""
    inside = rotate_x(state, math.pi / 2)
    shifted = rotate_z(inside, phi)
    return rotate_x(shifted, -math.pi / 2)


def basis_state(two_j: int, m: float) -> JState:
    """|j,m> as a JState."""
    two_m = _twice(m)
    _check_index(two_j, two_m)
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[(two_m + two_j) // 2] = 1.0
    return JState(two_j=two_j, amps=amps)


def require_even(two_j: int, what: str) -> None:
    if two_j % 2:
        raise InvalidInputError(f"{what} needs an even photon number, got N = {two_j}")
