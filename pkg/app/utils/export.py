"""
CSV and plot-script writers.

Data files start with one '#' metadata line (version and configuration
echo) and never contain timestamps, so identical inputs give identical bytes.
"""
import logging
import math
from pathlib import Path
from typing import Iterable, TextIO

import pandas as pd

from app.config import settings
from app.models.schemas import JState, SensitivitySample

logger = logging.getLogger(__name__)

SENSITIVITY_COLUMNS = ["state", "N", "scheme", "lambda", "phi_star", "delta_phi_min", "success_proxy"]


def float_format() -> str:
    return f"%.{settings.CSV_SIGNIFICANT_DIGITS}g"


def metadata_line(**config) -> str:
    echo = " ".join(f"{key}={value}" for key, value in config.items())
    return f"# {settings.APP_NAME} {settings.APP_VERSION} {echo}".rstrip() + "\n"


def sensitivity_frame(samples: Iterable[SensitivitySample]) -> pd.DataFrame:
    rows = [
        {
            "state": sample.state_label,
            "N": sample.two_j,
            "scheme": sample.scheme.value,
            "lambda": sample.transmission,
            "phi_star": sample.phi,
            "delta_phi_min": (
                "divergent" if sample.divergent or math.isinf(sample.delta_phi)
                else float_format() % sample.delta_phi
            ),
            "success_proxy": sample.success_proxy,
        }
        for sample in samples
    ]
    return pd.DataFrame(rows, columns=SENSITIVITY_COLUMNS)


def state_frame(state: JState) -> pd.DataFrame:
    return pd.DataFrame({"m": state.m_values, "re": state.amps.real, "im": state.amps.imag})


def write_frame(frame: pd.DataFrame, stream: TextIO, **config) -> None:
    stream.write(metadata_line(**config))
    frame.to_csv(stream, index=False, float_format=float_format(), lineterminator="\n")


def save_frame(frame: pd.DataFrame, path: Path, **config) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_frame(frame, handle, **config)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_plot_script(path: Path, csv_files: dict[int, Path], curves: list[str]) -> Path:
    """Gnuplot script drawing delta_phi_min against lambda from each CSV."""
    lines = [
        "# gnuplot script",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'transmission lambda'",
        "set ylabel 'minimum phase sensitivity'",
        "set logscale y",
    ]
    for n_photons, csv_path in sorted(csv_files.items()):
        lines.append("set terminal pngcairo size 800,600")
        lines.append(f"set output '{csv_path.stem}.png'")
        lines.append(f"set title 'N = {n_photons}'")
        plots = [
            f"'{csv_path.name}' using 1:{column} with lines"
            + (" dashtype 2" if curve == "baseline" else "")
            for column, curve in enumerate(curves, start=2)
        ]
        lines.append("plot " + ", \\\n     ".join(plots))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote plot script {path}")
    return path
