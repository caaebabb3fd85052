"""
Lossless phase sensitivity for the parity and photon-number-difference schemes.

Scalar operations follow the d-matrix formulas directly. The optimiser works
on vectorised phase responses that propagate the state in the J_y eigenbasis
and return (mean, variance, derivative) with an analytic derivative; the
variance is built from the even/odd output probabilities so that it keeps
its relative accuracy where the signal saturates.
"""
import logging
import math
from typing import Callable

import numpy as np
from scipy import linalg

from app.config import settings
from app.models.errors import ConsistencyError, InvalidInputError, NoSignalError
from app.models.schemas import DetectionScheme, JState, SensitivitySample
from app.services import su2
from app.utils.optimize import golden_section_search

logger = logging.getLogger(__name__)

# Below this variance the ratio of two rounding-level numbers is meaningless
VARIANCE_FLOOR = 1e-12


def parity_signs(two_j: int) -> np.ndarray:
    """Eigenvalues (-1)^{j-m} of P = (-1)^{b^dagger b} along the basis."""
    return np.where((np.arange(two_j + 1) + two_j) % 2, -1.0, 1.0)


def _real_or_raise(value: complex, what: str) -> float:
    if abs(value.imag) > settings.IMAG_TOL:
        raise ConsistencyError(f"{what} has imaginary residual {value.imag:.3e}")
    return float(value.real)


def parity_expectation(state: JState, phi: float) -> float:
    """
    <P_out> = sum_{m,n} c*_m c_n (-1)^{j+m-2n} d^j_{mn}(2 phi).

    Raises:
        ConsistencyError: If the accumulated value is not real.
    """
    d = su2.wigner_block(state.two_j, 2 * phi).d
    signs = parity_signs(state.two_j)
    value = np.vdot(state.amps, (signs[:, None] * d) @ state.amps)
    return _real_or_raise(complex(value), "Parity expectation")


def parity_expectation_direct(state: JState, phi: float) -> float:
    """Same expectation by rotating the state and applying the parity diagonal."""
    rotated = su2.rotate_y(state, phi)
    value = np.vdot(rotated.amps, parity_signs(state.two_j) * rotated.amps)
    return _real_or_raise(complex(value), "Parity expectation")


def jz_observable(two_j: int, phi: float) -> np.ndarray:
    """U^dagger J_z U = -sin(phi) J_x + cos(phi) J_z."""
    return -math.sin(phi) * su2.jx_matrix(two_j) + math.cos(phi) * su2.jz_matrix(two_j)


def jz_expectation_and_variance(state: JState, phi: float) -> tuple[float, float]:
    """Mean and variance of J_z at the output."""
    observable = jz_observable(state.two_j, phi)
    image = observable @ state.amps
    mean = float(np.vdot(state.amps, image).real)
    second = float(np.vdot(image, image).real)
    return mean, max(second - mean**2, 0.0)


def finite_difference(f: Callable[[float], float], x: float, h: float) -> float:
    """Five-point central difference."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


class PhaseResponse:
    """
    Propagates one input state through e^{-i phi J_y} for arrays of phi.

    Subclasses turn the propagated vectors into (mean, variance, derivative)
    of their observable.
    """

    scheme: DetectionScheme

    def __init__(self, state: JState):
        self.state = state
        self._jy = su2.jy_matrix(state.two_j)
        self._mu, self._basis = linalg.eigh(self._jy)
        self._coords = self._basis.conj().T @ state.amps

    def propagate(self, phis) -> np.ndarray:
        """Rows are e^{-i phi J_y}|in> for each phi."""
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        phases = np.exp(-1j * np.outer(phis, self._mu))
        return (phases * self._coords[None, :]) @ self._basis.T

    def evaluate(self, phis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError

    def success_probability(self) -> float:
        return 1.0


class ParityResponse(PhaseResponse):
    """Lossless parity: mean p+ - p-, variance 4 p+ p-."""

    scheme = DetectionScheme.PARITY

    def __init__(self, state: JState):
        super().__init__(state)
        self._signs = parity_signs(state.two_j)
        self._odd = self._signs < 0

    def probabilities(self, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        weights = np.abs(psi) ** 2
        odd = weights[:, self._odd].sum(axis=1)
        even = weights[:, ~self._odd].sum(axis=1)
        total = even + odd
        return even / total, odd / total

    def derivative(self, psi: np.ndarray) -> np.ndarray:
        """d<P>/dphi = -2 Im <psi| J_y P |psi>."""
        projected = psi * self._signs[None, :]
        return -2.0 * np.einsum("tm,mn,tn->t", psi.conj(), self._jy, projected).imag

    def evaluate(self, phis):
        psi = self.propagate(phis)
        even, odd = self.probabilities(psi)
        return even - odd, 4.0 * even * odd, self.derivative(psi)


class JzResponse(PhaseResponse):
    """
    Photon-number difference, from input moments of J_x and J_z:
    <O> = -s<J_x> + c<J_z>, Var O = s^2 Var J_x - s c Cov{J_x,J_z} + c^2 Var J_z.

    Moments are taken about the mean so that the variance never comes from
    subtracting two nearly equal numbers.
    """

    scheme = DetectionScheme.JZ

    def __init__(self, state: JState):
        super().__init__(state)
        jx = su2.jx_matrix(state.two_j)
        jz = su2.jz_matrix(state.two_j)
        c = state.amps

        self._x = float(np.vdot(c, jx @ c).real)
        self._z = float(np.vdot(c, jz @ c).real)
        dx = jx @ c - self._x * c
        dz = jz @ c - self._z * c
        self._vxx = float(np.vdot(dx, dx).real)
        self._vzz = float(np.vdot(dz, dz).real)
        self._cxz = 2.0 * float(np.vdot(dx, dz).real)

    def evaluate(self, phis):
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        s, c = np.sin(phis), np.cos(phis)
        mean = -s * self._x + c * self._z
        variance = s**2 * self._vxx - s * c * self._cxz + c**2 * self._vzz
        derivative = -c * self._x - s * self._z
        return mean, np.maximum(variance, 0.0), derivative


def build_response(state: JState, scheme: DetectionScheme) -> PhaseResponse:
    if scheme == DetectionScheme.PARITY:
        return ParityResponse(state)
    if scheme == DetectionScheme.JZ:
        return JzResponse(state)
    raise InvalidInputError(f"Unknown detection scheme: {scheme}")


def delta_phi_from_moments(mean, variance, derivative) -> tuple[np.ndarray, np.ndarray]:
    """
    delta_phi = sqrt(variance) / |d mean / d phi| elementwise.

    Returns:
        (delta_phi, divergent) with delta_phi = inf where the derivative
        vanishes or the variance is below rounding level.
    """
    variance = np.maximum(np.asarray(variance, dtype=float), 0.0)
    slope = np.abs(np.asarray(derivative, dtype=float))
    divergent = (slope < settings.DIVERGENCE_FLOOR) | (variance < VARIANCE_FLOOR)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(divergent, np.inf, np.sqrt(variance) / np.where(divergent, 1.0, slope))
    return delta, divergent


def _check_derivatives(numeric: float, analytic: float, phi: float) -> None:
    if abs(analytic) <= 1e-6:
        return
    rel = abs(numeric - analytic) / abs(analytic)
    if rel > settings.DERIVATIVE_RTOL:
        logger.warning(
            f"Finite-difference and analytic derivatives differ at phi={phi:.6g}: "
            f"{numeric:.12g} vs {analytic:.12g} (rel {rel:.2e})"
        )


def observable_mean(state: JState, phi: float, scheme: DetectionScheme) -> float:
    if scheme == DetectionScheme.PARITY:
        return parity_expectation(state, phi)
    return jz_expectation_and_variance(state, phi)[0]


def check_phase(phi: float) -> None:
    """Operating phases live in the open interval (0, pi)."""
    if not 0.0 < phi < math.pi:
        raise InvalidInputError(f"phi = {phi} outside (0, pi)")


def sensitivity(
    state: JState,
    phi: float,
    scheme: DetectionScheme,
    label: str = "custom",
) -> SensitivitySample:
    """
    delta_phi = Delta O / |d<O>/dphi| at one phase.

    The derivative is a five-point finite difference, cross-checked against
    the analytic derivative of the phase response.
    """
    check_phase(phi)
    if scheme == DetectionScheme.PARITY:
        mean = parity_expectation(state, phi)
        variance = (1.0 - mean) * (1.0 + mean)  # P^2 = 1
    else:
        mean, variance = jz_expectation_and_variance(state, phi)

    slope = finite_difference(lambda x: observable_mean(state, x, scheme), phi, settings.FD_STEP)
    analytic = float(build_response(state, scheme).evaluate([phi])[2][0])
    _check_derivatives(slope, analytic, phi)

    divergent = abs(slope) < settings.DIVERGENCE_FLOOR
    delta = math.inf if divergent else math.sqrt(max(variance, 0.0)) / abs(slope)
    return SensitivitySample(
        phi=phi,
        delta_phi=delta,
        scheme=scheme,
        state_label=label,
        two_j=state.two_j,
        divergent=divergent,
    )


def phase_grid() -> np.ndarray:
    """Coarse grid over (0, pi) whose first point is the small-phase floor."""
    return np.linspace(settings.PHI_FLOOR, math.pi - settings.PHI_FLOOR, settings.PHI_GRID_POINTS)


def minimize_response(
    objective: Callable[[np.ndarray], np.ndarray],
    what: str,
) -> tuple[float, float]:
    """
    Minimum of a vectorised delta_phi(phi) on the branch that starts at the
    small-phase floor.

    The grid is walked downhill from its first finite point until the values
    rise; the minimum of that basin is then refined by golden-section search.
    Later basins (e.g. a second Yurke dip near phi = 2.2) are not considered.

    Raises:
        NoSignalError: If every grid point is divergent.
    """
    grid = phase_grid()
    values = objective(grid)
    finite = np.isfinite(values)
    if not finite.any():
        raise NoSignalError(f"No phase information for {what}: every grid point diverges")

    best = int(np.argmax(finite))
    last = grid.shape[0] - 1
    while best < last and finite[best + 1] and values[best + 1] <= values[best]:
        best += 1
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, last)]

    phi_star, delta_star = golden_section_search(
        lambda x: float(objective(np.array([x]))[0]), lo, hi, tol=settings.GOLDEN_TOL
    )
    if not delta_star <= values[best]:
        phi_star, delta_star = float(grid[best]), float(values[best])
    logger.debug(f"Minimum for {what}: delta_phi={delta_star:.12g} at phi={phi_star:.12g}")
    return phi_star, delta_star


def minimize_sensitivity(
    state: JState,
    scheme: DetectionScheme,
    label: str = "custom",
) -> SensitivitySample:
    """Smallest delta_phi over phi in (0, pi) for a lossless interferometer."""
    response = build_response(state, scheme)

    def objective(phis: np.ndarray) -> np.ndarray:
        return delta_phi_from_moments(*response.evaluate(phis))[0]

    phi_star, delta_star = minimize_response(objective, f"{label} / {scheme.value}")
    logger.info(f"{label} N={state.two_j} {scheme.value}: delta_phi_min={delta_star:.12g}")
    return SensitivitySample(
        phi=phi_star,
        delta_phi=delta_star,
        scheme=scheme,
        state_label=label,
        two_j=state.two_j,
    )


def yurke_jz_reference(two_j: int, phi: float) -> float:
    """Closed-form J_z sensitivity of the Yurke state."""
    jj = (two_j / 2) * (two_j / 2 + 1)
    s, c = math.sin(phi), math.cos(phi)
    return math.sqrt((jj - 1) * s**2 + c**2) / abs(math.sqrt(jj) * c + s)


def dual_fock_parity_reference(two_j: int, phi: float, h: float = 1e-6) -> float:
    """{1 - [d^j_00(2 phi)]^2}^{1/2} / |d d^j_00(2 phi)/d phi|."""
    def d00(x: float) -> float:
        return su2.wigner_d(two_j, 0, 0, 2 * x)

    value = d00(phi)
    return math.sqrt((1 - value) * (1 + value)) / abs(finite_difference(d00, phi, h))
