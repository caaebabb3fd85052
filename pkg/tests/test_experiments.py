import math

import numpy as np
import pytest

from app.models.errors import InvalidInputError
from app.models.schemas import DetectionScheme, RunConfig, StateFamily
from app.services import experiments


def test_fig2_table_columns_and_lossless_values():
    table = experiments.fig2_table(4, np.array([0.9, 1.0]))
    assert list(table.columns) == ["lambda", "baseline"] + [c for c, _, _ in experiments.FIG2_CURVES]
    lossless = table.iloc[-1]
    assert lossless["noon"] == pytest.approx(0.25, abs=1e-9)
    assert lossless["dual_fock"] == pytest.approx(1 / math.sqrt(12), rel=1e-3)
    assert lossless["yurke"] == pytest.approx(1 / math.sqrt(6), rel=1e-3)
    assert lossless["baseline"] == pytest.approx(0.5)
    values = table.drop(columns="lambda").to_numpy()
    assert np.all(np.isfinite(values)) and np.all(values > 0)


def test_fig2_default_grid():
    grid = experiments.fig2_lambda_grid()
    assert grid[0] == 0.5 and grid[-1] == 1.0 and len(grid) == 101


def test_run_sensitivity_minimises_per_transmission():
    config = RunConfig(state_label=StateFamily.NOON, n_photons=4, lambda_grid=[1.0, 0.8])
    samples = experiments.run_sensitivity(config)
    assert [s.transmission for s in samples] == [1.0, 0.8]
    assert samples[0].delta_phi == pytest.approx(0.25, abs=1e-9)
    assert samples[1].delta_phi > samples[0].delta_phi
    assert samples[1].success_proxy < 1.0


def test_run_sensitivity_at_fixed_phase():
    config = RunConfig(state_label=StateFamily.YURKE, n_photons=4, scheme=DetectionScheme.JZ, phi=0.3)
    (sample,) = experiments.run_sensitivity(config)
    assert sample.phi == 0.3
    assert sample.scheme == DetectionScheme.JZ


def test_run_sensitivity_flags_dual_fock_jz():
    config = RunConfig(state_label=StateFamily.DUAL_FOCK, n_photons=4, scheme=DetectionScheme.JZ)
    (sample,) = experiments.run_sensitivity(config)
    assert sample.divergent
    assert math.isinf(sample.delta_phi)


def test_run_sensitivity_rejects_jz_with_loss():
    config = RunConfig(state_label=StateFamily.YURKE, n_photons=4, scheme=DetectionScheme.JZ, lambda_grid=[0.9])
    with pytest.raises(InvalidInputError):
        experiments.run_sensitivity(config)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(state_label=StateFamily.NOON, n_photons=4, eta=10.0)
    with pytest.raises(ValueError):
        RunConfig(state_label=StateFamily.NOON, n_photons=4, lambda_grid=[0.0])
    with pytest.raises(ValueError):
        RunConfig(state_label=StateFamily.NOON, n_photons=0)


@pytest.mark.parametrize("n_photons", [4, 6])
def test_loss_curves_are_monotone_in_transmission(n_photons):
    table = experiments.fig2_table(n_photons, np.linspace(0.5, 1.0, 50))
    for column in ["baseline"] + [c for c, _, _ in experiments.FIG2_CURVES]:
        values = table[column].to_numpy()
        assert np.all(np.diff(values) <= 1e-9 * values[1:]), column


def test_requested_eta_one_is_labelled_with_substitute():
    config = RunConfig(state_label=StateFamily.INTELLIGENT, n_photons=4, eta=1.0)
    (sample,) = experiments.run_sensitivity(config)
    assert sample.state_label == "intelligent(eta=1.000001,m0=0)"


def test_fixed_phase_outside_interval_is_rejected():
    config = RunConfig(state_label=StateFamily.YURKE, n_photons=4, phi=0.0)
    with pytest.raises(InvalidInputError):
        experiments.run_sensitivity(config)
