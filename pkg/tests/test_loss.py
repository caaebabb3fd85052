import math

import numpy as np
import pytest

from app.models.errors import InvalidInputError
from app.models.schemas import DetectionScheme, IntelligentSpec, JState, LossChannel, StateFamily
from app.services import detection, loss, states
from app.services.oracle import FockOracle

TRANSMISSIONS = [0.1, 0.5, 0.9]


def _random_state(two_j: int, rng: np.random.Generator) -> JState:
    return JState.from_unnormalized(two_j, rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1))


@pytest.mark.parametrize("two_j", range(1, 7))
@pytest.mark.parametrize("lam", TRANSMISSIONS)
def test_q_matrix_three_ways(two_j, lam):
    direct = loss.q_matrix(two_j, LossChannel(transmission=lam)).q
    closed = loss.q_matrix_closed_form(two_j, lam)
    brute = FockOracle(two_j).survival_matrix(lam)
    assert np.max(np.abs(closed - direct)) < 1e-10
    assert np.max(np.abs(brute - direct)) < 1e-10


@pytest.mark.parametrize("two_j", [2, 5, 8])
def test_q_matrix_is_hermitian_with_known_trace(two_j):
    lam = 0.7
    q = loss.q_matrix(two_j, LossChannel(transmission=lam)).q
    np.testing.assert_allclose(q, q.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(q)) > -1e-12
    assert np.trace(q).real == pytest.approx(np.sum(loss.attenuation_diagonal(two_j, lam) ** 2))


def test_q_element_without_loss_is_identity():
    assert loss.q_element(4, 1, 1, 1.0) == 1.0
    assert loss.q_element(4, 1, -1, 1.0) == 0.0
    np.testing.assert_allclose(loss.q_matrix_closed_form(3, 1.0), np.eye(4))


def test_q_element_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        loss.q_element(2, 0, 0, 1.5)
    with pytest.raises(InvalidInputError):
        loss.q_element(2, 0.5, 0, 0.5)


def test_lossy_mean_factorises():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        two_j = int(rng.integers(1, 7))
        state = _random_state(two_j, rng)
        phi = float(rng.uniform(0, math.pi))
        lam = float(rng.uniform(0.05, 1.0))
        oracle_mean, _ = FockOracle(two_j).simulate_pipeline(state, phi, lam)
        expected = lam**two_j * detection.parity_expectation(state, phi)
        assert abs(oracle_mean - expected) < 1e-12


@pytest.mark.parametrize("two_j", [1, 3, 4])
def test_lossy_moments_match_oracle(two_j):
    rng = np.random.default_rng(two_j)
    state = _random_state(two_j, rng)
    channel = LossChannel(transmission=0.8)
    oracle = FockOracle(two_j)
    for phi in (0.3, 1.4, 2.5):
        mean, second = loss.lossy_parity_moments(state, phi, channel)
        o_mean, o_second = oracle.simulate_pipeline(state, phi, 0.8)
        assert mean == pytest.approx(o_mean, abs=1e-11)
        assert second == pytest.approx(o_second, abs=1e-11)


def test_noon_survival_probability():
    for lam in (0.3, 0.75, 1.0):
        survival = loss.survival_probability(states.noon_equivalent_input(4), LossChannel(transmission=lam))
        assert survival == pytest.approx((1 + lam**8) / 2, abs=1e-12)


@pytest.mark.parametrize("two_j", [2, 4, 6])
@pytest.mark.parametrize("lam", [0.6, 0.85, 1.0])
def test_noon_lossy_optimum(two_j, lam):
    sample = loss.minimize_lossy_sensitivity(states.noon_equivalent_input(two_j), LossChannel(transmission=lam))
    assert sample.delta_phi == pytest.approx(loss.noon_reference(two_j, lam), rel=1e-8)
    assert sample.success_proxy == pytest.approx((1 + lam ** (2 * two_j)) / 2, abs=1e-12)


def test_lossy_sensitivity_at_fixed_phase():
    two_j, lam = 4, 0.8
    sample = loss.lossy_sensitivity(
        states.noon_equivalent_input(two_j), math.pi / (2 * two_j), LossChannel(transmission=lam)
    )
    assert sample.delta_phi == pytest.approx(loss.noon_reference(two_j, lam), rel=1e-7)
    assert sample.transmission == lam


@pytest.mark.parametrize("family", [StateFamily.YURKE, StateFamily.DUAL_FOCK, StateFamily.NOON])
def test_unit_transmission_reduces_to_lossless(family):
    state = states.build_state(family, 4)
    lossy = loss.minimize_lossy_sensitivity(state, LossChannel(transmission=1.0))
    lossless = detection.minimize_sensitivity(state, DetectionScheme.PARITY)
    assert lossy.delta_phi == pytest.approx(lossless.delta_phi, rel=1e-9)


def test_vectorised_lossy_response_matches_moments():
    rng = np.random.default_rng(9)
    state = _random_state(5, rng)
    channel = LossChannel(transmission=0.7)
    response = loss.LossyParityResponse(state, channel)
    phis = np.array([0.4, 1.5, 2.2])
    mean, variance, _ = response.evaluate(phis)
    for k, phi in enumerate(phis):
        o_mean, o_second = loss.lossy_parity_moments(state, phi, channel)
        assert mean[k] == pytest.approx(o_mean, abs=1e-11)
        assert variance[k] == pytest.approx(o_second - o_mean**2, abs=1e-11)


def test_noon_crosses_baseline_for_four_photons():
    crossing = loss.find_baseline_crossing(states.noon_equivalent_input(4), 0.6, 0.95, tol=1e-4)
    assert 0.72 <= crossing <= 0.78


def test_noon_crosses_baseline_for_six_photons():
    crossing = loss.find_baseline_crossing(states.noon_equivalent_input(6), 0.6, 0.95, tol=1e-4)
    assert 0.77 <= crossing <= 0.83


def test_crossing_requires_bracket():
    with pytest.raises(InvalidInputError):
        loss.find_baseline_crossing(states.noon_equivalent_input(4), 0.9, 0.95, tol=1e-3)


def test_ordering_at_ninety_percent_transmission():
    channel = LossChannel(transmission=0.9)
    candidates = [
        states.noon_equivalent_input(4),
        states.dual_fock_state(4),
        states.intelligent_state(IntelligentSpec(two_j=4, m0=0, eta=10.0)),
        states.yurke_state(4),
        states.intelligent_state(IntelligentSpec(two_j=4, m0=0, eta=1.001)),
    ]
    values = [loss.minimize_lossy_sensitivity(state, channel).delta_phi for state in candidates]
    assert values == sorted(values)
    assert len(set(values)) == len(values)


def test_sweep_keeps_grid_order():
    grid = [1.0, 0.6, 0.8]
    samples = loss.sweep_lambda(states.dual_fock_state(4), grid, DetectionScheme.PARITY, "dual-fock")
    assert [s.transmission for s in samples] == grid
    assert samples[1].delta_phi > samples[2].delta_phi > samples[0].delta_phi


def test_sweep_rejects_jz_with_loss_and_bad_lambda():
    with pytest.raises(InvalidInputError):
        loss.sweep_lambda(states.yurke_state(2), [0.9], DetectionScheme.JZ)
    with pytest.raises(InvalidInputError):
        loss.sweep_lambda(states.yurke_state(2), [0.0])


def test_jz_sweep_without_loss_flags_divergence():
    samples = loss.sweep_lambda(states.dual_fock_state(4), [1.0], DetectionScheme.JZ)
    assert samples[0].divergent
    assert math.isinf(samples[0].delta_phi)


def test_baseline_shot_noise():
    assert loss.baseline_shot_noise(4, LossChannel(transmission=0.25)) == pytest.approx(1.0)
    assert math.isinf(loss.baseline_shot_noise(4, LossChannel(transmission=0.0)))


def test_lossy_mode_matrix():
    lossless = loss.lossy_mode_matrix(0.9, 1.0)
    np.testing.assert_allclose(lossless.conj().T @ lossless, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(loss.lossy_mode_matrix(0.0, 1.0), np.eye(2), atol=1e-15)
    lossy = loss.lossy_mode_matrix(0.9, 0.6)
    assert not np.allclose(lossy.conj().T @ lossy, np.eye(2))


@pytest.mark.parametrize("two_j", range(1, 9))
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
def test_closed_form_q_matches_direct_sum(two_j, lam):
    direct = loss.q_matrix(two_j, LossChannel(transmission=lam)).q
    closed = loss.q_matrix_closed_form(two_j, lam)
    assert np.max(np.abs(closed - direct)) < 1e-10


def test_fixed_phase_lossy_sensitivity_rejects_phase_outside_interval():
    with pytest.raises(InvalidInputError):
        loss.lossy_sensitivity(states.noon_equivalent_input(4), math.pi, LossChannel(transmission=0.8))


def test_yurke_stays_on_small_phase_branch_with_loss():
    sample = loss.minimize_lossy_sensitivity(states.yurke_state(4), LossChannel(transmission=0.9))
    assert sample.phi < 1.0
