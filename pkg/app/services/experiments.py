"""
Computations shared by the CLI and the HTTP routes.
"""
import logging

import numpy as np
import pandas as pd

from app.config import settings
from app.models.errors import InvalidInputError, NoSignalError
from app.models.schemas import DetectionScheme, LossChannel, RunConfig, SensitivitySample, StateFamily
from app.services import detection, loss, states

logger = logging.getLogger(__name__)

# (column, family, eta) for the loss-comparison figure, best to worst
FIG2_CURVES = [
    ("noon", StateFamily.NOON, None),
    ("dual_fock", StateFamily.DUAL_FOCK, None),
    ("intelligent_eta10", StateFamily.INTELLIGENT, 10.0),
    ("yurke", StateFamily.YURKE, None),
    ("intelligent_eta1", StateFamily.INTELLIGENT, 1.0),
]


def _divergent(config: RunConfig, label: str, lam: float) -> SensitivitySample:
    return SensitivitySample(
        phi=float("nan"), delta_phi=float("inf"), scheme=config.scheme,
        state_label=label, two_j=config.n_photons, transmission=lam, divergent=True,
    )


def run_sensitivity(config: RunConfig) -> list[SensitivitySample]:
    """
    One sample per transmission in the config.

    With config.phi set, delta_phi is evaluated at that phase; otherwise it
    is minimised over phi.
    """
    state = states.build_state(config.state_label, config.n_photons, config.eta, config.m0)
    label = states.state_label(config.state_label, config.eta, config.m0)

    if config.scheme == DetectionScheme.JZ and any(lam != 1.0 for lam in config.lambda_grid):
        raise InvalidInputError("The loss model is defined for the parity scheme only")

    samples = []
    for lam in config.lambda_grid:
        channel = LossChannel(transmission=lam)
        if config.phi is not None:
            if config.scheme == DetectionScheme.PARITY and lam != 1.0:
                samples.append(loss.lossy_sensitivity(state, config.phi, channel, label))
            else:
                samples.append(detection.sensitivity(state, config.phi, config.scheme, label))
            continue
        if config.scheme == DetectionScheme.PARITY:
            samples.append(loss.minimize_lossy_sensitivity(state, channel, label))
            continue
        try:
            samples.append(detection.minimize_sensitivity(state, config.scheme, label))
        except NoSignalError as e:
            logger.info(f"{e}")
            samples.append(_divergent(config, label, lam))
    return samples


def fig2_lambda_grid(points: int | None = None) -> np.ndarray:
    return np.linspace(
        settings.FIG2_LAMBDA_MIN, settings.FIG2_LAMBDA_MAX, points or settings.FIG2_GRID_POINTS
    )


def fig2_table(n_photons: int, lambdas: np.ndarray) -> pd.DataFrame:
    """Baseline and the five state curves of delta_phi_min(lambda)."""
    table = {
        "lambda": lambdas,
        "baseline": [loss.baseline_shot_noise(n_photons, LossChannel(transmission=lam)) for lam in lambdas],
    }
    for column, family, eta in FIG2_CURVES:
        state = states.build_state(family, n_photons, eta)
        label = states.state_label(family, eta)
        samples = loss.sweep_lambda(state, list(lambdas), DetectionScheme.PARITY, label)
        table[column] = [sample.delta_phi for sample in samples]
    return pd.DataFrame(table)
