# src/core/squeezing_engine.py

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import ENTROPY_CONFIG, MAX_WORKERS, NUMERICS_CONFIG
from src.core.densela import (
    eig_hermitian,
    evolve,
    moments_batch,
    propagate,
    site_entropies,
)
from src.core.errors import (
    AllPointsDegenerate,
    DimensionMismatch,
    EmptyGrid,
    ThetaDependentMean,
    ValidationError,
)
from src.core.models import (
    EigenSystem,
    EllipseSamples,
    HermitianOperator,
    ObservableMode,
    QuantumState,
    SpinSystemSpec,
    SqueezingPoint,
    SweepGrid,
    SweepSummary,
)
from src.core.spin_model import (
    coherent_state,
    collective_operator,
    observable_operators,
    secular_hamiltonian,
)
from src.utils.decorators import timeit
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def sql_reference(n: int) -> float:
    """Standard quantum limit 1/sqrt(N) of the normalized uncertainty."""
    return float(1.0 / np.sqrt(n))


def rotate_x(psi: QuantumState, theta: float, jx_eig: EigenSystem) -> QuantumState:
    """exp(-i theta J_x)|psi> with theta in degrees."""
    if not np.isfinite(theta):
        raise ValidationError(f"theta must be finite, got {theta}")
    if jx_eig.dim != psi.dim:
        raise DimensionMismatch(f"rotation generator dimension {jx_eig.dim} != state dimension {psi.dim}")
    return QuantumState(propagate(psi.amplitudes, jx_eig, np.deg2rad(theta)), psi.n_spins)


@dataclass(frozen=True, eq=False)
class RotationFrame:
    """Observables expressed in the eigenbasis of the J_x rotation generator.

    In that basis a theta pulse is a diagonal phase, so the theta loop needs no
    matrix exponentials.
    """
    jx_eig: EigenSystem
    obs_x: np.ndarray
    obs_y: np.ndarray
    obs_z: np.ndarray

    @classmethod
    def build(cls, jx_eig: EigenSystem, observables: Dict[str, HermitianOperator]) -> 'RotationFrame':
        v = jx_eig.eigenvectors
        to_frame = {axis: v.conj().T @ op.matrix @ v for axis, op in observables.items()}
        return cls(jx_eig, to_frame['x'], to_frame['y'], to_frame['z'])

    @classmethod
    def for_mode(cls, n: int, mode: ObservableMode) -> 'RotationFrame':
        return cls.build(eig_hermitian(collective_operator(n, 'x')), observable_operators(n, mode))

    def coefficients(self, psi: QuantumState) -> np.ndarray:
        if self.jx_eig.dim != psi.dim:
            raise DimensionMismatch(
                f"rotation generator dimension {self.jx_eig.dim} != state dimension {psi.dim}")
        return self.jx_eig.eigenvectors.conj().T @ psi.amplitudes

    def rotate(self, coeffs: np.ndarray, thetas_deg: np.ndarray) -> np.ndarray:
        """Columns are exp(-i theta J_x)|psi> in the J_x eigenbasis, one per theta."""
        phases = np.exp(-1j * np.outer(self.jx_eig.eigenvalues, np.deg2rad(thetas_deg)))
        return phases * coeffs[:, None]

    def means(self, coeffs: np.ndarray) -> Tuple[float, float, float]:
        column = coeffs[:, None]
        return tuple(float(moments_batch(column, op)[0][0])
                     for op in (self.obs_x, self.obs_y, self.obs_z))


def _first_within(values: np.ndarray, tol: float) -> int:
    """Smallest index whose value is within tol of the minimum."""
    return int(np.flatnonzero(values <= values.min() + tol)[0])


def theta_sweep(psi_tau: QuantumState,
                grid: SweepGrid,
                frame: Optional[RotationFrame] = None,
                thetas_deg: Optional[np.ndarray] = None) -> Tuple[float, float, float, EllipseSamples]:
    """Delta J_y and Delta J_z of the theta-rotated state over the theta grid.

    Returns (delta_b, delta_a, theta_opt, samples): delta_b is the minimum of
    Delta J_y^theta, theta_opt its smallest arg-min and delta_a = Delta J_z^theta_opt.
    """
    if frame is None:
        frame = RotationFrame.for_mode(psi_tau.n_spins, ObservableMode.collective())
    thetas = grid.thetas() if thetas_deg is None else np.asarray(thetas_deg, dtype=float)
    if thetas.size == 0:
        raise EmptyGrid("theta grid is empty")

    coeffs = frame.coefficients(psi_tau)
    j_exp = frame.means(coeffs)
    rotated = frame.rotate(coeffs, thetas)
    mean_y, delta_y = moments_batch(rotated, frame.obs_y)
    mean_z, delta_z = moments_batch(rotated, frame.obs_z)

    # <J_x> commutes with the pulse; <J_y>, <J_z> must not move either
    tol = NUMERICS_CONFIG['mean_theta_tol']
    drift = max(np.max(np.abs(mean_y - j_exp[1])), np.max(np.abs(mean_z - j_exp[2])))
    if drift > tol:
        raise ThetaDependentMean(f"mean spin depends on theta (drift {drift:.2e})")

    k = _first_within(delta_y, NUMERICS_CONFIG['theta_tie_tol'])
    j_mag = float(np.sqrt(sum(c ** 2 for c in j_exp)))
    samples = EllipseSamples(thetas, delta_y, delta_z, j_mag)
    return float(delta_y[k]), float(delta_z[k]), float(thetas[k]), samples


def analyze_tau(psi0: QuantumState,
                h_eig: EigenSystem,
                tau: float,
                grid: SweepGrid,
                observable_mode: ObservableMode = ObservableMode.collective(),
                frame: Optional[RotationFrame] = None) -> SqueezingPoint:
    """Evolve to tau, measure the mean spin, sweep theta and normalize by J."""
    n = psi0.n_spins
    if frame is None:
        frame = RotationFrame.for_mode(n, observable_mode)
    psi_tau = evolve(psi0, h_eig, tau)
    j_exp = frame.means(frame.coefficients(psi_tau))
    delta_b, delta_a, theta_opt, samples = theta_sweep(psi_tau, grid, frame)
    j_mag = samples.j_mag

    j_max = n / 2 if observable_mode.is_collective else 0.5
    degenerate = j_mag < NUMERICS_CONFIG['degenerate_fraction'] * j_max
    if j_mag > 0.0:
        sigma_b, sigma_a = delta_b / j_mag, delta_a / j_mag
    else:
        sigma_b = sigma_a = float('inf')

    return SqueezingPoint(
        tau=float(tau),
        j_exp=j_exp,
        j_mag=j_mag,
        delta_b=delta_b,
        delta_a=delta_a,
        theta_opt=theta_opt,
        sigma_b=sigma_b,
        sigma_a=sigma_a,
        entropy=site_entropies(psi_tau),
        degenerate=degenerate,
        ellipse=samples,
    )


def _local_minima(values: np.ndarray) -> np.ndarray:
    """Indices not exceeding either neighbour (end points compare to one side)."""
    left = np.concatenate(([True], values[1:] <= values[:-1]))
    right = np.concatenate((values[:-1] <= values[1:], [True]))
    return np.flatnonzero(left & right)


def squeezing_windows(points: List[SqueezingPoint], sigma_0: float) -> Tuple[Tuple[float, float], ...]:
    """Contiguous tau intervals where sigma_b stays below the SQL."""
    windows = []
    start = prev = None
    for p in points:
        below = not p.degenerate and p.sigma_b < sigma_0 - 1e-9
        if below and start is None:
            start = p.tau
        if not below and start is not None:
            windows.append((start, prev))
            start = None
        prev = p.tau
    if start is not None:
        windows.append((start, prev))
    return tuple(windows)


def summarize(points: List[SqueezingPoint], spec: SpinSystemSpec, grid: SweepGrid) -> SweepSummary:
    """Reduce a tau series to its optimum.

    Among the dips of sigma_b lying within dip_tol of the global minimum the
    shortest evolution time wins; degenerate points never qualify.
    The reported sigma_min is that dip's value, at most dip_tol above the
    global minimum.
    """
    valid = [p for p in points if not p.degenerate]
    if not valid:
        raise AllPointsDegenerate("every grid point has J below the degeneracy threshold")

    sigma = np.array([p.sigma_b for p in valid])
    dips = _local_minima(sigma)
    candidates = dips[sigma[dips] <= sigma.min() + NUMERICS_CONFIG['dip_tol']]
    best = valid[int(candidates[0])]

    finite = [p for p in points if np.isfinite(p.sigma_b)]
    raw = min(finite, key=lambda p: (p.sigma_b, p.tau))
    sigma_0 = sql_reference(spec.n_spins)

    return SweepSummary(
        sigma_min=best.sigma_b,
        tau_min=best.tau,
        theta_min=best.theta_opt,
        sigma_a_min=best.sigma_a,
        sigma_0=sigma_0,
        n_spins=spec.n_spins,
        grid=grid,
        observable_mode=spec.observable_mode,
        j_initial=points[0].j_mag,
        sigma_min_raw=raw.sigma_b,
        tau_min_raw=raw.tau,
        entropy_at_tau_min=best.entropy,
        squeezing_windows=squeezing_windows(points, sigma_0),
        n_degenerate=len(points) - len(valid),
    )


class SqueezingEngine:
    """Precomputes the eigensystems of H_r and J_x once and sweeps the tau grid."""

    def __init__(self, spec: SpinSystemSpec, grid: SweepGrid, max_workers: int = MAX_WORKERS):
        self.spec = spec
        self.grid = grid
        self.max_workers = max_workers
        self.psi0 = coherent_state(spec.n_spins)
        self.h_eig = eig_hermitian(secular_hamiltonian(spec))

    @cached_property
    def frame(self) -> RotationFrame:
        return RotationFrame.for_mode(self.spec.n_spins, self.spec.observable_mode)

    def run(self) -> List[SqueezingPoint]:
        taus = self.grid.taus()
        logger.info(f"Sweeping {taus.size} tau points x {self.grid.thetas().size} theta points "
                    f"for N={self.spec.n_spins} ({self.spec.observable_mode})")
        frame = self.frame
        results: Dict[int, SqueezingPoint] = {}
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_index = {
                executor.submit(analyze_tau, self.psi0, self.h_eig, tau, self.grid,
                                self.spec.observable_mode, frame): k
                for k, tau in enumerate(taus)
            }
            for future in as_completed(future_to_index):
                results[future_to_index[future]] = future.result()
        return [results[k] for k in range(taus.size)]

    def entropy_trace(self) -> pd.DataFrame:
        rows = []
        for tau in self.grid.taus():
            psi = evolve(self.psi0, self.h_eig, tau)
            rows.append((float(tau),) + site_entropies(psi))
        columns = ['tau_ns'] + [f"entropy_{i}" for i in range(1, self.spec.n_spins + 1)]
        return pd.DataFrame(rows, columns=columns)


@timeit
def tau_sweep(spec: SpinSystemSpec, grid: SweepGrid,
              max_workers: int = MAX_WORKERS) -> Tuple[List[SqueezingPoint], SweepSummary]:
    points = SqueezingEngine(spec, grid, max_workers).run()
    summary = summarize(points, spec, grid)
    logger.info(f"N={spec.n_spins}: sigma_min={summary.sigma_min:.4f} at tau={summary.tau_min:g} ns, "
                f"theta={summary.theta_min:g} deg (SQL {summary.sigma_0:.4f})")
    if summary.n_degenerate:
        logger.warning(f"{summary.n_degenerate} degenerate grid points excluded from the minimum")
    return points, summary


@timeit
def entropy_trace(spec: SpinSystemSpec, grid: SweepGrid) -> pd.DataFrame:
    """Single-site von Neumann entropies for every tau of the grid."""
    return SqueezingEngine(spec, grid).entropy_trace()


def first_plateau_crossing(trace: pd.DataFrame,
                           tol: float = ENTROPY_CONFIG['plateau_tol']) -> Optional[float]:
    """First tau at which some site entropy comes within tol of ln 2."""
    entropies = trace.drop(columns='tau_ns').max(axis=1)
    reached = trace.loc[entropies >= np.log(2) - tol, 'tau_ns']
    return float(reached.iloc[0]) if not reached.empty else None


def ellipse_closure(samples: EllipseSamples, tol: float = 1e-10) -> bool:
    """180 degree periodicity and Delta J_z^theta = Delta J_y^(theta+90) on the sampled grid.

    The 90 degree partner is looked up modulo 180, so a [0, 180) grid suffices.
    """
    dy, dz = samples.delta_y, samples.delta_z
    exact = {round(t, 6): k for k, t in enumerate(samples.theta_deg)}
    folded = {}
    for k, t in enumerate(samples.theta_deg):
        folded.setdefault(round(t % 180.0, 6), k)
    for k, theta in enumerate(samples.theta_deg):
        period = exact.get(round(theta + 180.0, 6))
        if period is not None and (abs(dy[period] - dy[k]) > tol or abs(dz[period] - dz[k]) > tol):
            return False
        swap = folded.get(round((theta + 90.0) % 180.0, 6))
        if swap is not None and abs(dy[swap] - dz[k]) > tol:
            return False
    return True


def points_frame(points: List[SqueezingPoint]) -> pd.DataFrame:
    """The tau series as a DataFrame with the result-record columns."""
    n = len(points[0].entropy) if points else 0
    records = []
    for p in points:
        record = {
            'tau_ns': p.tau,
            'jx': p.j_exp[0],
            'jy': p.j_exp[1],
            'jz': p.j_exp[2],
            'j_mag': p.j_mag,
            'delta_b': p.delta_b,
            'delta_a': p.delta_a,
            'theta_opt_deg': p.theta_opt,
            'sigma_b': p.sigma_b,
            'sigma_a': p.sigma_a,
        }
        record.update({f"entropy_{i + 1}": s for i, s in enumerate(p.entropy)})
        record['degenerate_flag'] = int(p.degenerate)
        records.append(record)
    columns = (['tau_ns', 'jx', 'jy', 'jz', 'j_mag', 'delta_b', 'delta_a', 'theta_opt_deg',
                'sigma_b', 'sigma_a'] + [f"entropy_{i}" for i in range(1, n + 1)] + ['degenerate_flag'])
    return pd.DataFrame(records, columns=columns)
