"""
Oracle-versus-closed-form check suite behind the `verify` command.
"""
import logging

import numpy as np

from app.config import settings
from app.models.errors import InvalidInputError
from app.models.schemas import IntelligentSpec, JState, LossChannel, VerificationRow
from app.services import detection, loss, states, su2
from app.services.oracle import FockOracle

logger = logging.getLogger(__name__)

CHECK_TRANSMISSIONS = (0.1, 0.5, 0.9)
CHECK_PHASES = (0.137, 0.61, 1.234, 2.05, 2.9)


def _families(two_j: int) -> dict[str, JState]:
    found = {"noon": states.noon_equivalent_input(two_j), "single-port": states.single_port_fock(two_j)}
    if two_j % 2 == 0:
        found["yurke"] = states.yurke_state(two_j)
        found["dual-fock"] = states.dual_fock_state(two_j)
        found["intelligent"] = states.intelligent_state(IntelligentSpec(two_j=two_j, m0=0, eta=10.0))
    return found


def _row(check: str, two_j: int, lam: float, deviation: float) -> VerificationRow:
    return VerificationRow(
        check=check,
        n_photons=two_j,
        transmission=lam,
        max_deviation=deviation,
        passed=bool(deviation < settings.VERIFY_TOL),
    )


def run_verification(max_n: int) -> list[VerificationRow]:
    """
    Run every check for N = 1..max_n.

    Raises:
        InvalidInputError: If max_n is outside [1, ORACLE_MAX_N].
    """
    if not 1 <= max_n <= settings.ORACLE_MAX_N:
        raise InvalidInputError(f"max_n must be in [1, {settings.ORACLE_MAX_N}], got {max_n}")

    rows: list[VerificationRow] = []
    for two_j in range(1, max_n + 1):
        oracle = FockOracle(two_j)
        families = _families(two_j)

        for lam in CHECK_TRANSMISSIONS:
            direct = loss.q_matrix(two_j, LossChannel(transmission=lam)).q
            closed = loss.q_matrix_closed_form(two_j, lam)
            rows.append(_row("q_closed_form_vs_direct_sum", two_j, lam, float(np.max(np.abs(closed - direct)))))
            brute = oracle.survival_matrix(lam)
            rows.append(_row("q_direct_sum_vs_oracle", two_j, lam, float(np.max(np.abs(brute - direct)))))

        deviation = 0.0
        for state in families.values():
            for phi in CHECK_PHASES:
                mean, _ = oracle.simulate_pipeline(state, phi, 1.0)
                deviation = max(deviation, abs(mean - detection.parity_expectation(state, phi)))
        rows.append(_row("lossless_parity_vs_oracle", two_j, 1.0, deviation))

        lam = 0.8
        channel = LossChannel(transmission=lam)
        mean_dev = second_dev = 0.0
        for state in families.values():
            for phi in CHECK_PHASES:
                o_mean, o_second = oracle.simulate_pipeline(state, phi, lam)
                mean, second = loss.lossy_parity_moments(state, phi, channel)
                mean_dev = max(mean_dev, abs(o_mean - mean))
                second_dev = max(second_dev, abs(o_second - second))
        rows.append(_row("lossy_mean_vs_oracle", two_j, lam, mean_dev))
        rows.append(_row("second_moment_vs_oracle", two_j, lam, second_dev))

        unitary = oracle.beam_splitter_unitary(("a", "b"), np.pi / 2)
        rows.append(_row(
            "oracle_unitarity", two_j, 1.0,
            float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(oracle.dim)))),
        ))

        composed = np.column_stack([
            su2.interferometer(su2.basis_state(two_j, p - two_j / 2), 0.7).amps
            for p in range(two_j + 1)
        ])
        rows.append(_row(
            "interferometer_equals_y_rotation", two_j, 1.0,
            float(np.max(np.abs(composed - su2.wigner_block(two_j, 0.7).d))),
        ))

    failed = sum(not row.passed for row in rows)
    logger.info(f"Verification finished: {len(rows)} checks, {failed} failed")
    return rows
