# src/core/results_writer.py

import json
import os
from typing import Any, Dict, List

import pandas as pd

from src.core.errors import ResultsIoError
from src.core.models import EllipseSamples, SqueezingPoint, SweepSummary
from src.core.squeezing_engine import points_frame
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

FLOAT_FORMAT = '%.6g'
TIMESERIES_FILE = 'timeseries.csv'
SUMMARY_FILE = 'summary.json'
ENTROPY_FILE = 'entropy.csv'
TABLE_FILE = 'table1.csv'


def _sig6(value: float) -> float:
    return float(FLOAT_FORMAT % value)


def ellipse_filename(tau: float) -> str:
    return f"ellipse_tau{tau:g}.csv"


def _write_csv(frame: pd.DataFrame, path: str) -> str:
    if frame.empty:
        raise ResultsIoError(f"refusing to write an empty table to {path}")
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise ResultsIoError(f"could not write {path}: {e}") from e
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def write_timeseries(points: List[SqueezingPoint], path: str) -> str:
    """One row per tau with the result-record columns."""
    if not points:
        raise ResultsIoError(f"refusing to write an empty time series to {path}")
    return _write_csv(points_frame(points), path)


def summary_record(summary: SweepSummary) -> Dict[str, Any]:
    """Flat key/value view of a sweep summary, numbers at 6 significant digits."""
    grid = summary.grid
    record: Dict[str, Any] = {
        'sigma_min': _sig6(summary.sigma_min),
        'tau_min_ns': _sig6(summary.tau_min),
        'theta_min_deg': _sig6(summary.theta_min),
        'sigma_a_min': _sig6(summary.sigma_a_min),
        'sigma_0': _sig6(summary.sigma_0),
        'ratio': _sig6(summary.ratio),
        'reduction_pct': _sig6(100.0 * (1.0 - summary.ratio)),
        'squeezed': bool(summary.squeezed),
        'n_spins': int(summary.n_spins),
        'mode': str(summary.observable_mode),
        'j_initial': _sig6(summary.j_initial),
        'sigma_min_raw': _sig6(summary.sigma_min_raw),
        'tau_min_raw_ns': _sig6(summary.tau_min_raw),
        'n_degenerate': int(summary.n_degenerate),
        'squeezing_windows_ns': ';'.join(f"{a:g}-{b:g}" for a, b in summary.squeezing_windows),
        'grid_tau_start_ns': float(grid.tau_start),
        'grid_tau_end_ns': float(grid.tau_end),
        'grid_tau_step_ns': float(grid.tau_step),
        'grid_theta_start_deg': float(grid.theta_start),
        'grid_theta_end_deg': float(grid.theta_end),
        'grid_theta_step_deg': float(grid.theta_step),
    }
    for i, s in enumerate(summary.entropy_at_tau_min, start=1):
        record[f"entropy_{i}_at_tau_min"] = _sig6(s)
    return record


def write_summary(summary: SweepSummary, path: str) -> str:
    if summary is None:
        raise ResultsIoError(f"refusing to write an empty summary to {path}")
    try:
        text = json.dumps(summary_record(summary), indent=2) + '\n'
    except (TypeError, ValueError) as e:
        raise ResultsIoError(f"summary for {path} is not serializable: {e}") from e
    tmp_path = path + '.tmp'
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(tmp_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except OSError as e:
        raise ResultsIoError(f"could not write {path}: {e}") from e
    return path


def write_ellipse(samples: EllipseSamples, path: str) -> str:
    """(theta_deg, sigma_y, sigma_z) rows: the normalized uncertainty ellipse."""
    if samples is None or samples.theta_deg.size == 0:
        raise ResultsIoError(f"refusing to write an empty ellipse to {path}")
    sigma_y, sigma_z = samples.normalized()
    frame = pd.DataFrame({'theta_deg': samples.theta_deg, 'sigma_y': sigma_y, 'sigma_z': sigma_z})
    return _write_csv(frame, path)


def write_entropy_trace(trace: pd.DataFrame, path: str) -> str:
    return _write_csv(trace, path)


def write_table(rows: pd.DataFrame, path: str) -> str:
    return _write_csv(rows, path)


def read_timeseries(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise ResultsIoError(f"CSV file {path} not found.")
    try:
        return pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise ResultsIoError(f"could not read {path}: {e}") from e


class ResultsWriter:
    """Lays out the files of one run under a single output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_run(self, points: List[SqueezingPoint], summary: SweepSummary) -> Dict[str, str]:
        best = next(p for p in points if p.tau == summary.tau_min)
        paths = {
            'timeseries': write_timeseries(points, self.path(TIMESERIES_FILE)),
            'summary': write_summary(summary, self.path(SUMMARY_FILE)),
            'ellipse': write_ellipse(best.ellipse, self.path(ellipse_filename(summary.tau_min))),
        }
        logger.info(f"Results written to {self.out_dir}")
        return paths
