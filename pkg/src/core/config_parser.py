# src/core/config_parser.py

"""JSON scenario configuration.

Schema (all keys optional unless noted):
    kind             "uniform" | "triangle" | "chain" | "custom"   (required)
    n                number of spins (required for uniform; 3 for triangle/chain)
    d_mhz            uniform coupling d/(2 pi) in MHz (required for uniform)
    matrix           custom N x N symmetric coupling matrix in MHz
    geometry         custom alternative to matrix:
                     {"positions_nm": [[x, y, z], ...], "gamma_ghz_per_t": g or [g_i],
                      "spin": 0.5, "field_axis": [0, 0, 1]}
    observable_mode  "collective" (default) | "single_site"
    site             1-based site measured in single_site mode (default 1)
    tau_start_ns, tau_end_ns, tau_step_ns
    theta_start_deg, theta_end_deg, theta_step_deg
    out_dir          output directory
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config.settings import (
    DEFAULT_TAU_STEP_NS,
    DEFAULT_THETA_END_DEG,
    DEFAULT_THETA_STEP_DEG,
    ELECTRON_GAMMA_GHZ_PER_T,
    OUTPUT_DIR,
    SCENARIO_CONFIG,
)
from src.core.errors import SchemaError, SiteOutOfRange, ValidationError
from src.core.models import GeometrySpec, ObservableMode, SpinSystemSpec, SweepGrid
from src.scenarios.base_scenario import BaseScenario
from src.scenarios.chain_scenario import ChainScenario
from src.scenarios.custom_scenario import CustomScenario
from src.scenarios.triangle_scenario import TriangleScenario
from src.scenarios.uniform_scenario import UniformScenario

KINDS = ('uniform', 'triangle', 'chain', 'custom')
GRID_KEYS = ('tau_start_ns', 'tau_end_ns', 'tau_step_ns',
             'theta_start_deg', 'theta_end_deg', 'theta_step_deg')
KNOWN_KEYS = {'kind', 'n', 'd_mhz', 'matrix', 'geometry', 'observable_mode', 'site',
              'out_dir', *GRID_KEYS}
GEOMETRY_KEYS = {'positions_nm', 'gamma_ghz_per_t', 'spin', 'field_axis'}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    n_spins: int
    d_mhz: Optional[float]
    matrix: Optional[Tuple[Tuple[float, ...], ...]]
    geometry: Optional[GeometrySpec]
    observable_mode: ObservableMode
    grid: SweepGrid
    out_dir: str

    def scenario(self) -> BaseScenario:
        if self.kind == 'uniform':
            return UniformScenario(self.n_spins, self.d_mhz, self.grid.tau_end)
        if self.kind == 'triangle':
            return TriangleScenario()
        if self.kind == 'chain':
            return ChainScenario(self.observable_mode)
        matrix = None if self.matrix is None else np.array(self.matrix, dtype=float)
        return CustomScenario(matrix, self.geometry, self.observable_mode)

    def build_spec(self) -> SpinSystemSpec:
        return self.scenario().build_spec().with_mode(self.observable_mode)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind, 'n': self.n_spins}
        if self.d_mhz is not None:
            data['d_mhz'] = self.d_mhz
        if self.matrix is not None:
            data['matrix'] = [list(row) for row in self.matrix]
        if self.geometry is not None:
            g = self.geometry
            data['geometry'] = {
                'positions_nm': g.positions.tolist(),
                'gamma_ghz_per_t': g.gyromagnetic_ratios.tolist(),
                'spin': g.spin_magnitude,
                'field_axis': g.field_axis.tolist(),
            }
        data['observable_mode'] = self.observable_mode.kind
        if not self.observable_mode.is_collective:
            data['site'] = self.observable_mode.site
        grid = self.grid
        data.update({
            'tau_start_ns': grid.tau_start,
            'tau_end_ns': grid.tau_end,
            'tau_step_ns': grid.tau_step,
            'theta_start_deg': grid.theta_start,
            'theta_end_deg': grid.theta_end,
            'theta_step_deg': grid.theta_step,
            'out_dir': self.out_dir,
        })
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(value):
        raise SchemaError(path, "must be finite")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _matrix(value: Any, path: str) -> Tuple[Tuple[float, ...], ...]:
    if not isinstance(value, list) or not value:
        raise SchemaError(path, "expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != len(value):
            raise SchemaError(f"{path}[{i}]", f"expected a row of {len(value)} numbers")
        rows.append(tuple(_number(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)))
    matrix = np.array(rows)
    if not np.array_equal(matrix, matrix.T):
        raise ValidationError(f"{path}: coupling matrix is not symmetric")
    if np.any(np.diag(matrix) != 0.0):
        raise ValidationError(f"{path}: coupling matrix needs a zero diagonal")
    return tuple(rows)


def _geometry(value: Any, path: str) -> GeometrySpec:
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    for key in value:
        if key not in GEOMETRY_KEYS:
            raise SchemaError(f"{path}.{key}", "unknown key")
    if 'positions_nm' not in value:
        raise SchemaError(f"{path}.positions_nm", "required")
    positions = value['positions_nm']
    if not isinstance(positions, list) or len(positions) < 2:
        raise SchemaError(f"{path}.positions_nm", "expected at least two 3-vectors")
    for i, p in enumerate(positions):
        if not isinstance(p, list) or len(p) != 3:
            raise SchemaError(f"{path}.positions_nm[{i}]", "expected [x, y, z]")
        for j, v in enumerate(p):
            _number(v, f"{path}.positions_nm[{i}][{j}]")
    gammas = value.get('gamma_ghz_per_t', ELECTRON_GAMMA_GHZ_PER_T)
    if isinstance(gammas, list):
        if len(gammas) != len(positions):
            raise SchemaError(f"{path}.gamma_ghz_per_t", "needs one value per spin")
        gammas = [_number(g, f"{path}.gamma_ghz_per_t[{i}]") for i, g in enumerate(gammas)]
    else:
        gammas = _number(gammas, f"{path}.gamma_ghz_per_t")
    spin = _number(value['spin'], f"{path}.spin") if 'spin' in value else 0.5
    axis = value.get('field_axis', [0.0, 0.0, 1.0])
    if not isinstance(axis, list) or len(axis) != 3:
        raise SchemaError(f"{path}.field_axis", "expected [x, y, z]")
    axis = tuple(_number(v, f"{path}.field_axis[{j}]") for j, v in enumerate(axis))
    return GeometrySpec(positions, gammas, spin, axis)


def _observable_mode(data: Dict[str, Any], n: int) -> ObservableMode:
    kind = data.get('observable_mode', 'collective')
    if kind not in ('collective', 'single_site'):
        raise SchemaError('observable_mode', f"expected 'collective' or 'single_site', got {kind!r}")
    if kind == 'collective':
        if 'site' in data:
            raise SchemaError('site', "only valid with observable_mode 'single_site'")
        return ObservableMode.collective()
    site = _integer(data['site'], 'site') if 'site' in data else 1
    if not 1 <= site <= n:
        raise SiteOutOfRange(f"site: {site} outside 1..{n}")
    return ObservableMode.single_site(site)


def _grid(data: Dict[str, Any], kind: str) -> SweepGrid:
    defaults = {
        'tau_start_ns': 0.0,
        'tau_end_ns': SCENARIO_CONFIG[kind]['tau_end_ns'],
        'tau_step_ns': DEFAULT_TAU_STEP_NS,
        'theta_start_deg': 0.0,
        'theta_end_deg': DEFAULT_THETA_END_DEG,
        'theta_step_deg': DEFAULT_THETA_STEP_DEG,
    }
    values = {key: _number(data[key], key) if key in data else default
              for key, default in defaults.items()}
    return SweepGrid(values['tau_start_ns'], values['tau_end_ns'], values['tau_step_ns'],
                     values['theta_start_deg'], values['theta_end_deg'], values['theta_step_deg'])


def config_from_dict(data: Any) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise SchemaError('$', "expected a JSON object")
    for key in data:
        if key not in KNOWN_KEYS:
            raise SchemaError(key, "unknown key")
    if 'kind' not in data:
        raise SchemaError('kind', "required")
    kind = data['kind']
    if kind not in KINDS:
        raise SchemaError('kind', f"expected one of {', '.join(KINDS)}, got {kind!r}")

    d_mhz = matrix = geometry = None
    if kind == 'uniform':
        for key in ('n', 'd_mhz'):
            if key not in data:
                raise SchemaError(key, "required for kind 'uniform'")
        n = _integer(data['n'], 'n')
        if n < 2:
            raise ValidationError(f"n: uniform scenario needs n >= 2, got {n}")
        d_mhz = _number(data['d_mhz'], 'd_mhz')
    elif kind in ('triangle', 'chain'):
        for key in ('d_mhz', 'matrix', 'geometry'):
            if key in data:
                raise SchemaError(key, f"not allowed for kind {kind!r}")
        n = _integer(data['n'], 'n') if 'n' in data else 3
        if n != 3:
            raise ValidationError(f"n: kind {kind!r} has exactly 3 spins, got {n}")
    else:
        if 'd_mhz' in data:
            raise SchemaError('d_mhz', "not allowed for kind 'custom'")
        if ('matrix' in data) == ('geometry' in data):
            raise SchemaError('matrix', "kind 'custom' needs exactly one of matrix or geometry")
        if 'matrix' in data:
            matrix = _matrix(data['matrix'], 'matrix')
            n = len(matrix)
        else:
            geometry = _geometry(data['geometry'], 'geometry')
            n = geometry.n_spins
        if 'n' in data and _integer(data['n'], 'n') != n:
            raise ValidationError(f"n: {data['n']} does not match the {n} spins of the couplings")

    out_dir = data.get('out_dir', OUTPUT_DIR)
    if not isinstance(out_dir, str):
        raise SchemaError('out_dir', "expected a string")

    return ScenarioConfig(
        kind=kind,
        n_spins=n,
        d_mhz=d_mhz,
        matrix=matrix,
        geometry=geometry,
        observable_mode=_observable_mode(data, n),
        grid=_grid(data, kind),
        out_dir=out_dir,
    )


def load_config_dict(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError('$', f"invalid JSON ({e.msg} at line {e.lineno})") from e
    if not isinstance(data, dict):
        raise SchemaError('$', "expected a JSON object")
    return data


def parse_config(text: str) -> ScenarioConfig:
    return config_from_dict(load_config_dict(text))


def apply_overrides(data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Flags win over config-file values; None means the flag was not given."""
    merged = dict(data)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return merged

