import argparse
import os
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from config.settings import (
    DEFAULT_D_MHZ,
    ELECTRON_GAMMA_GHZ_PER_T,
    ENTROPY_CONFIG,
    MAX_SPINS,
    MAX_WORKERS,
    OUTPUT_DIR,
)
from src.core.config_parser import ScenarioConfig, apply_overrides, config_from_dict, load_config_dict
from src.core.errors import ConfigError, NumericalError, ResultsIoError, ValidationError
from src.core.models import GeometrySpec
from src.core.results_writer import (
    ENTROPY_FILE,
    TABLE_FILE,
    ResultsWriter,
    write_entropy_trace,
    write_table,
)
from src.core.spin_model import coupling_matrix
from src.core.squeezing_engine import entropy_trace, first_plateau_crossing, tau_sweep
from src.utils.decorators import timeit
from src.utils.logger import set_global_level, setup_logger

logger = setup_logger(__name__)


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def emit(**fields) -> None:
    """One key=value line on stdout."""
    print(' '.join(f"{key}={value}" for key, value in fields.items()))


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding='utf-8') as f:
                data = load_config_dict(f.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
    overrides = {
        'kind': args.kind,
        'n': args.n,
        'd_mhz': args.d_mhz,
        'tau_end_ns': args.tau_max_ns,
        'tau_step_ns': args.tau_step_ns,
        'theta_step_deg': args.theta_step_deg,
        'observable_mode': args.mode,
        'site': args.site,
        'out_dir': args.out,
    }
    return config_from_dict(apply_overrides(data, overrides))


def cmd_run(config: ScenarioConfig) -> int:
    spec = config.build_spec()
    points, summary = tau_sweep(spec, config.grid, MAX_WORKERS)
    ResultsWriter(config.out_dir).write_run(points, summary)
    emit(sigma_min=_fmt(summary.sigma_min), tau_min=_fmt(summary.tau_min),
         theta_min=_fmt(summary.theta_min), sigma_0=_fmt(summary.sigma_0))
    emit(sigma_a_min=_fmt(summary.sigma_a_min), ratio=_fmt(summary.ratio),
         n_spins=summary.n_spins, mode=summary.observable_mode)
    if not summary.squeezed:
        emit(note='no_squeezing')
    return 0


@timeit
def table1_rows(d_mhz: float, n_max: int, base: Optional[dict] = None) -> pd.DataFrame:
    """Uniform sweeps for N = 2..n_max: N, J, sigma_0, sigma_min, tau_min, theta_min, ratio."""
    if not 2 <= n_max <= MAX_SPINS:
        raise ValidationError(f"n_max must lie in 2..{MAX_SPINS}, got {n_max}")
    rows = []
    for n in range(2, n_max + 1):
        config = config_from_dict(apply_overrides(base or {}, {'kind': 'uniform', 'n': n, 'd_mhz': d_mhz}))
        _, summary = tau_sweep(config.build_spec(), config.grid, MAX_WORKERS)
        rows.append({
            'n_spins': n,
            'j': summary.j_initial,
            'sigma_0': summary.sigma_0,
            'sigma_min': summary.sigma_min,
            'tau_min_ns': summary.tau_min,
            'theta_min_deg': summary.theta_min,
            'ratio': summary.ratio,
        })
    return pd.DataFrame(rows)


def cmd_table1(d_mhz: float, n_max: int, out_dir: str, base: Optional[dict] = None) -> int:
    table = table1_rows(d_mhz, n_max, base)
    write_table(table, os.path.join(out_dir, TABLE_FILE))
    for row in table.itertuples(index=False):
        emit(n=row.n_spins, j=_fmt(row.j), sigma_0=_fmt(row.sigma_0), sigma_min=_fmt(row.sigma_min),
             tau_min=_fmt(row.tau_min_ns), theta_min=_fmt(row.theta_min_deg), ratio=_fmt(row.ratio))
    return 0


def cmd_couple(geometry: GeometrySpec) -> int:
    d = coupling_matrix(geometry)
    n = geometry.n_spins
    emit(n_spins=n)
    for i in range(n):
        for j in range(i + 1, n):
            emit(**{f"d_{i + 1}_{j + 1}_mhz": _fmt(d[i, j])})
    for i in range(n):
        emit(**{f"row_{i + 1}": ','.join(_fmt(v) for v in d[i])})
    return 0


def cmd_entropy(config: ScenarioConfig) -> int:
    spec = config.build_spec()
    trace = entropy_trace(spec, config.grid)
    path = write_entropy_trace(trace, os.path.join(config.out_dir, ENTROPY_FILE))
    crossing = first_plateau_crossing(trace, ENTROPY_CONFIG['plateau_tol'])
    max_entropy = float(trace.drop(columns='tau_ns').to_numpy().max())
    emit(max_entropy=_fmt(max_entropy), ln2=_fmt(np.log(2)),
         plateau_tau_ns=_fmt(crossing) if crossing is not None else 'none')
    emit(file=path)
    return 0


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON scenario config; flags override its values")
    p.add_argument("--kind", choices=["uniform", "triangle", "chain", "custom"])
    p.add_argument("--n", type=int, help="Number of spins")
    p.add_argument("--d-mhz", type=float, help="Uniform coupling d/(2 pi) in MHz")
    _add_grid_flags(p)
    p.add_argument("--mode", choices=["collective", "single_site"], help="Observable mode")
    p.add_argument("--site", type=int, help="1-based site for single_site mode")


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau-max-ns", type=float, help="Last evolution time of the grid")
    p.add_argument("--tau-step-ns", type=float)
    p.add_argument("--theta-step-deg", type=float)
    p.add_argument("--out", help=f"Output directory (default {OUTPUT_DIR})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Spin squeezing in dipole-coupled spin-1/2 systems")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Sweep tau and theta for one scenario")
    _add_scenario_flags(run)

    table1 = sub.add_parser("table1", help="Uniform sweeps for N = 2..n_max")
    table1.add_argument("--d-mhz", type=float, default=DEFAULT_D_MHZ)
    table1.add_argument("--n-max", type=int, default=10)
    _add_grid_flags(table1)

    couple = sub.add_parser("couple", help="Dipolar couplings from spin positions")
    couple.add_argument("--position", action="append", nargs=3, type=float, required=True,
                        metavar=("X", "Y", "Z"), help="Spin position in nm (repeat per spin)")
    couple.add_argument("--gamma", type=float, nargs="+", default=[ELECTRON_GAMMA_GHZ_PER_T],
                        help="Gyromagnetic ratio in GHz/T, one value or one per spin")
    couple.add_argument("--spin", type=float, default=0.5)
    couple.add_argument("--field-axis", nargs=3, type=float, default=[0.0, 0.0, 1.0],
                        metavar=("X", "Y", "Z"))

    entropy = sub.add_parser("entropy", help="Single-site entropy trace")
    _add_scenario_flags(entropy)
    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        return cmd_run(load_config(args))
    if args.command == "entropy":
        return cmd_entropy(load_config(args))
    if args.command == "table1":
        base = apply_overrides({}, {
            'tau_end_ns': args.tau_max_ns,
            'tau_step_ns': args.tau_step_ns,
            'theta_step_deg': args.theta_step_deg,
        })
        return cmd_table1(args.d_mhz, args.n_max, args.out or OUTPUT_DIR, base)
    gammas = args.gamma[0] if len(args.gamma) == 1 else args.gamma
    if len(args.gamma) > 1 and len(args.gamma) != len(args.position):
        raise ValidationError("--gamma needs one value or one value per --position")
    return cmd_couple(GeometrySpec(args.position, gammas, args.spin, tuple(args.field_axis)))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    if args.verbose:
        set_global_level("DEBUG")

    try:
        return dispatch(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ResultsIoError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        logger.debug("Numerical failure", exc_info=True)
        print(f"numerical error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
