"""
Parity statistics of a Mach-Zehnder interferometer with loss in arm b.

Inside the interferometer the loss acts as Lambda = diag(lambda^{j-m}) on
the surviving N-photon component. The first parity moment factorises as
lambda^N times the lossless value; the second is the survival probability
<Y2> = <in| R^dagger Lambda^2 R |in>, R = e^{-i(pi/2)J_x}, which does not
depend on phi.
"""
import logging
import math

import numpy as np
from scipy.optimize import brentq

from app.config import settings
from app.models.errors import ConsistencyError, InvalidInputError, NoSignalError
from app.models.schemas import DetectionScheme, JState, LossChannel, QMatrix, SensitivitySample
from app.services import detection, su2
from app.utils.specialfn import jacobi_poly_shifted, log_factorial, pochhammer

logger = logging.getLogger(__name__)


def attenuation_diagonal(two_j: int, transmission: float) -> np.ndarray:
    """Diagonal of Lambda: lambda^{j-m} along the basis."""
    return transmission ** (two_j - np.arange(two_j + 1)).astype(float)


def q_element(two_j: int, m: float, n: float, transmission: float) -> complex:
    """
    Closed-form Q_mn(lambda) = <j,m|Y2|j,n>, x = lambda^2.

    For m >= n:
        i^{-(m+n+2j)} (2j)! sqrt((j+n)!) / [(j-n+1)_{j+n} sqrt((j-m)!(j+m)!(j-n)!)]
        * 4^{-j} (1+x)^{2j+n-m} (1-x)^{m-n} P_{j+n}^{(-2j-1, m-n)}(1 - 8x/(1+x)^2)
    and Q_mn = conj(Q_nm) otherwise. The grouped powers are the product
    ((x^2-1)/4)^j ((1+x)/(1-x))^{j+n-m} with its removable poles cancelled.
    """
    if not 0.0 <= transmission <= 1.0:
        raise InvalidInputError(f"Transmission {transmission} outside [0, 1]")
    two_m, two_n = round(2 * m), round(2 * n)
    for two_k in (two_m, two_n):
        if abs(two_k) > two_j or (two_j - two_k) % 2:
            raise InvalidInputError(f"Index {two_k / 2} invalid for j = {two_j / 2}")
    if two_m < two_n:
        return q_element(two_j, n, m, transmission).conjugate()
    if transmission == 1.0:
        return complex(two_m == two_n)

    x = transmission**2
    j_plus_n = (two_j + two_n) // 2
    j_minus_n = (two_j - two_n) // 2
    j_plus_m = (two_j + two_m) // 2
    j_minus_m = (two_j - two_m) // 2
    diff = (two_m - two_n) // 2

    log_ratio = (
        log_factorial(two_j)
        + 0.5 * log_factorial(j_plus_n)
        - 0.5 * (log_factorial(j_minus_m) + log_factorial(j_plus_m) + log_factorial(j_minus_n))
    )
    prefactor = math.exp(log_ratio) / pochhammer(j_minus_n + 1, j_plus_n)
    phase = 1j ** (-(j_plus_m + j_plus_n) % 4)
    powers = 4.0 ** (-two_j / 2) * (1 + x) ** (two_j - diff) * (1 - x) ** diff
    t = -4 * x / (1 + x) ** 2  # argument 1 - 8x/(1+x)^2 written as 1 + 2t
    poly = jacobi_poly_shifted(j_plus_n, -two_j - 1, diff, t)
    return phase * prefactor * powers * poly


def q_matrix_closed_form(two_j: int, transmission: float) -> np.ndarray:
    size = two_j + 1
    q = np.empty((size, size), dtype=complex)
    for p in range(size):
        for r in range(size):
            q[p, r] = q_element(two_j, p - two_j / 2, r - two_j / 2, transmission)
    return q


def q_matrix(two_j: int, channel: LossChannel) -> QMatrix:
    """Q = R^dagger Lambda^2 R with R = e^{-i(pi/2)J_x} (direct sum)."""
    rotation = su2.rotation_x_matrix(two_j, math.pi / 2)
    lam2 = attenuation_diagonal(two_j, channel.transmission) ** 2
    q = rotation.conj().T @ (lam2[:, None] * rotation)
    sym = 0.5 * (q + q.conj().T)
    q.setflags(write=False)
    sym.setflags(write=False)
    return QMatrix(two_j=two_j, transmission=channel.transmission, q=q, sym=sym)


def survival_probability(state: JState, channel: LossChannel) -> float:
    """<Y2>: probability that all N photons reach the detectors."""
    sym = q_matrix(state.two_j, channel).sym
    value = complex(np.vdot(state.amps, sym @ state.amps))
    if abs(value.imag) > settings.IMAG_TOL:
        raise ConsistencyError(f"<Y2> has imaginary residual {value.imag:.3e}")
    return float(value.real)


def lossy_parity_moments(state: JState, phi: float, channel: LossChannel) -> tuple[float, float]:
    """
    (<Y1>, <Y2>) for the N-photon projected parity.

    Raises:
        ConsistencyError: If the second moment falls below the squared mean.
    """
    factor = channel.transmission**state.two_j
    mean = factor * detection.parity_expectation(state, phi)
    second = survival_probability(state, channel)
    if second < mean**2 - 1e-10:
        raise ConsistencyError(
            f"Second moment {second:.12g} below squared mean {mean**2:.12g}"
        )
    return mean, second


def lossy_sensitivity(
    state: JState,
    phi: float,
    channel: LossChannel,
    label: str = "custom",
) -> SensitivitySample:
    """delta_phi from the Y1/Y2 moments; the slope is lambda^N times the lossless one."""
    detection.check_phase(phi)
    mean, second = lossy_parity_moments(state, phi, channel)
    factor = channel.transmission**state.two_j
    slope = factor * detection.finite_difference(
        lambda x: detection.parity_expectation(state, x), phi, settings.FD_STEP
    )
    divergent = abs(slope) < settings.DIVERGENCE_FLOOR
    delta = math.inf if divergent else math.sqrt(max(second - mean**2, 0.0)) / abs(slope)
    return SensitivitySample(
        phi=phi,
        delta_phi=delta,
        scheme=DetectionScheme.PARITY,
        state_label=label,
        two_j=state.two_j,
        transmission=channel.transmission,
        divergent=divergent,
        success_proxy=second,
    )


class LossyParityResponse(detection.ParityResponse):
    """
    Vectorised lossy parity response.

    Variance is (<Y2> - lambda^{2N}) + lambda^{2N} 4 p+ p-, each term
    non-negative, so no cancellation occurs as lambda -> 1.
    """

    def __init__(self, state: JState, channel: LossChannel):
        super().__init__(state)
        self.channel = channel
        self._factor = channel.transmission**state.two_j
        self._survival = survival_probability(state, channel)
        # Y2 = lambda^{2N} = 1 exactly without loss
        self._excess = 0.0 if channel.transmission == 1.0 else max(self._survival - self._factor**2, 0.0)

    def success_probability(self) -> float:
        return self._survival

    def evaluate(self, phis):
        psi = self.propagate(phis)
        even, odd = self.probabilities(psi)
        mean = self._factor * (even - odd)
        variance = self._excess + self._factor**2 * 4.0 * even * odd
        return mean, variance, self._factor * self.derivative(psi)


def minimize_lossy_sensitivity(
    state: JState,
    channel: LossChannel,
    label: str = "custom",
    response: LossyParityResponse | None = None,
) -> SensitivitySample:
    """Smallest parity delta_phi over phi in (0, pi) at one transmission."""
    response = response or LossyParityResponse(state, channel)

    def objective(phis: np.ndarray) -> np.ndarray:
        return detection.delta_phi_from_moments(*response.evaluate(phis))[0]

    base = dict(
        scheme=DetectionScheme.PARITY,
        state_label=label,
        two_j=state.two_j,
        transmission=channel.transmission,
        success_proxy=response.success_probability(),
    )
    try:
        phi_star, delta_star = detection.minimize_response(
            objective, f"{label} at lambda={channel.transmission:g}"
        )
    except NoSignalError:
        return SensitivitySample(phi=math.nan, delta_phi=math.inf, divergent=True, **base)
    return SensitivitySample(phi=phi_star, delta_phi=delta_star, **base)


def baseline_shot_noise(two_j: int, channel: LossChannel) -> float:
    """Attenuated shot-noise reference 1/sqrt(lambda N); inf at lambda = 0."""
    if channel.transmission == 0.0:
        return math.inf
    return 1.0 / math.sqrt(channel.transmission * two_j)


def noon_reference(two_j: int, transmission: float) -> float:
    """Optimum NOON sensitivity sqrt((1 + lambda^{2N})/2) / (N lambda^N)."""
    factor = transmission**two_j
    return math.sqrt((1 + factor**2) / 2) / (two_j * factor)


def sweep_lambda(
    state: JState,
    channel_grid: list[float],
    scheme: DetectionScheme = DetectionScheme.PARITY,
    label: str = "custom",
) -> list[SensitivitySample]:
    """
    Minimum delta_phi for each transmission, in grid order.

    Divergent points are returned flagged; they never stop the sweep.
    """
    if scheme != DetectionScheme.PARITY and any(lam != 1.0 for lam in channel_grid):
        raise InvalidInputError("The loss model is defined for the parity scheme only")

    samples: list[SensitivitySample] = []
    for lam in channel_grid:
        if not 0.0 < lam <= 1.0:
            raise InvalidInputError(f"lambda = {lam} outside (0, 1]")
        if scheme != DetectionScheme.PARITY:
            try:
                samples.append(detection.minimize_sensitivity(state, scheme, label))
            except NoSignalError:
                samples.append(SensitivitySample(
                    phi=math.nan, delta_phi=math.inf, scheme=scheme,
                    state_label=label, two_j=state.two_j, divergent=True,
                ))
            continue
        samples.append(minimize_lossy_sensitivity(state, LossChannel(transmission=lam), label))
    logger.info(f"Swept {len(samples)} transmissions for {label} N={state.two_j}")
    return samples


def find_baseline_crossing(state: JState, lam_lo: float, lam_hi: float, tol: float = 1e-6) -> float:
    """
    Transmission where delta_phi_min(lambda) meets 1/sqrt(lambda N).

    Brent's method on the difference; the bracket must straddle the root.
    """
    def gap(lam: float) -> float:
        channel = LossChannel(transmission=lam)
        sample = minimize_lossy_sensitivity(state, channel)
        return sample.delta_phi - baseline_shot_noise(state.two_j, channel)

    if gap(lam_lo) * gap(lam_hi) > 0:
        raise InvalidInputError(f"No crossing in [{lam_lo}, {lam_hi}]")
    return float(brentq(gap, lam_lo, lam_hi, xtol=tol))


def lossy_mode_matrix(phi: float, transmission: float) -> np.ndarray:
    """Non-unitary (a, b) transformation of the whole lossy interferometer."""
    z = transmission * np.exp(1j * phi)
    return 0.5 * np.array([[1 + z, -1j * (1 - z)], [1j * (1 - z), 1 + z]])
