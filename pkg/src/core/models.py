# src/core/models.py

from dataclasses import dataclass, field
from typing import Optional, Tuple, List

import numpy as np

from config.settings import NUMERICS_CONFIG
from src.core.errors import (
    AsymmetricCouplings,
    CoincidentPositions,
    DimensionMismatch,
    EmptyGrid,
    InvalidDensityMatrix,
    NonHermitianInput,
    SiteOutOfRange,
    ValidationError,
)


def n_spins_for_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray
    n_spins: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, 'amplitudes', amps)
        if amps.size != 2 ** self.n_spins:
            raise DimensionMismatch(
                f"state of dimension {amps.size} does not describe {self.n_spins} spins")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NUMERICS_CONFIG['norm_tol']:
            raise ValidationError(f"state is not normalized (norm={norm:.15f})")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> 'DensityMatrix':
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense complex Hermitian matrix on the 2^N dimensional spin space."""
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, 'matrix', m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=NUMERICS_CONFIG['hermitian_tol']):
            raise NonHermitianInput("matrix differs from its conjugate transpose")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: 'HermitianOperator') -> 'HermitianOperator':
        return HermitianOperator(self.matrix + other.matrix)

    def __matmul__(self, other: 'HermitianOperator') -> np.ndarray:
        # products of Hermitian operators are not Hermitian in general
        return self.matrix @ other.matrix

    def scaled(self, factor: float) -> 'HermitianOperator':
        return HermitianOperator(factor * self.matrix)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, 'matrix', m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDensityMatrix(f"density matrix must be square, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=NUMERICS_CONFIG['hermitian_tol']):
            raise InvalidDensityMatrix("density matrix is not Hermitian")
        trace = np.trace(m).real
        if abs(trace - 1.0) > NUMERICS_CONFIG['density_trace_tol']:
            raise InvalidDensityMatrix(f"trace is {trace:.12f}, expected 1")
        if np.linalg.eigvalsh(m).min() < -NUMERICS_CONFIG['density_eig_tol']:
            raise InvalidDensityMatrix("density matrix has a negative eigenvalue")

    @property
    def n_spins(self) -> int:
        return n_spins_for_dim(self.matrix.shape[0])


@dataclass(frozen=True)
class ObservableMode:
    """Collective J_k observables, or S_k^i of a single (1-based) site."""
    kind: str = 'collective'
    site: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ('collective', 'single_site'):
            raise ValidationError(f"unknown observable mode '{self.kind}'")
        if self.kind == 'single_site' and (self.site is None or self.site < 1):
            raise SiteOutOfRange(f"single_site mode needs a site >= 1, got {self.site}")
        if self.kind == 'collective' and self.site is not None:
            raise ValidationError("collective mode takes no site")

    @classmethod
    def collective(cls) -> 'ObservableMode':
        return cls('collective')

    @classmethod
    def single_site(cls, site: int) -> 'ObservableMode':
        return cls('single_site', site)

    @property
    def is_collective(self) -> bool:
        return self.kind == 'collective'

    def __str__(self) -> str:
        return 'collective' if self.is_collective else f"single_site({self.site})"


@dataclass(frozen=True, eq=False)
class SpinSystemSpec:
    """N spins with couplings d_ij/(2*pi) in MHz (symmetric, zero diagonal)."""
    n_spins: int
    couplings: np.ndarray
    observable_mode: ObservableMode = field(default_factory=ObservableMode.collective)

    def __post_init__(self):
        d = np.asarray(self.couplings, dtype=float)
        object.__setattr__(self, 'couplings', d)
        if self.n_spins < 1:
            raise ValidationError(f"n_spins must be >= 1, got {self.n_spins}")
        if d.shape != (self.n_spins, self.n_spins):
            raise ValidationError(
                f"coupling matrix shape {d.shape} does not match n_spins={self.n_spins}")
        if not np.all(np.isfinite(d)):
            raise ValidationError("coupling matrix contains non-finite values")
        if not np.array_equal(d, d.T):
            raise AsymmetricCouplings("coupling matrix must be symmetric")
        if np.any(np.diag(d) != 0.0):
            raise AsymmetricCouplings("coupling matrix must have a zero diagonal")
        mode = self.observable_mode
        if not mode.is_collective and mode.site > self.n_spins:
            raise SiteOutOfRange(f"site {mode.site} outside 1..{self.n_spins}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_spins

    def pair_couplings(self) -> List[Tuple[int, int, float]]:
        """Non-zero (i, j, d_ij) with i < j, 0-based."""
        return [(i, j, float(self.couplings[i, j]))
                for i in range(self.n_spins) for j in range(i + 1, self.n_spins)
                if self.couplings[i, j] != 0.0]

    def with_mode(self, mode: ObservableMode) -> 'SpinSystemSpec':
        return SpinSystemSpec(self.n_spins, self.couplings, mode)


@dataclass(frozen=True, eq=False)
class GeometrySpec:
    """Spin positions (nm), gamma (GHz/T), spin length S and field direction.

    The Zeeman frequency omega_0 and the rotating-frame frequency omega only
    enter through the resonance condition omega_0 = omega, so neither is stored.
    """
    positions: np.ndarray
    gyromagnetic_ratios: np.ndarray
    spin_magnitude: float = 0.5
    field_axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValidationError(f"positions must be a list of 3-vectors, got shape {pos.shape}")
        gammas = np.broadcast_to(np.asarray(self.gyromagnetic_ratios, dtype=float),
                                 (pos.shape[0],)).copy()
        axis = np.asarray(self.field_axis, dtype=float)
        object.__setattr__(self, 'positions', pos)
        object.__setattr__(self, 'gyromagnetic_ratios', gammas)
        object.__setattr__(self, 'field_axis', axis)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ValidationError("field_axis must be a unit 3-vector")
        n = pos.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(pos[i] - pos[j]) == 0.0:
                    raise CoincidentPositions(f"spins {i + 1} and {j + 1} share a position")

    @property
    def n_spins(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class SweepGrid:
    """tau grid in ns and theta grid in degrees, both inclusive of the end point."""
    tau_start: float = 0.0
    tau_end: float = 650.0
    tau_step: float = 1.0
    theta_start: float = 0.0
    theta_end: float = 179.0
    theta_step: float = 1.0

    def __post_init__(self):
        if self.tau_step <= 0 or self.theta_step <= 0:
            raise EmptyGrid("grid steps must be positive")
        if self.tau_end < self.tau_start or self.theta_end < self.theta_start:
            raise EmptyGrid("grid end lies before its start")
        if self.tau_start < 0:
            raise ValidationError("tau_start must be >= 0")
        if self.theta_start > 0 or self.theta_end + self.theta_step < 180.0 - 1e-9:
            raise ValidationError("theta grid must cover [0, 180) degrees")

    @staticmethod
    def _axis(start: float, end: float, step: float) -> np.ndarray:
        count = int(np.floor((end - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)

    def taus(self) -> np.ndarray:
        return self._axis(self.tau_start, self.tau_end, self.tau_step)

    def thetas(self) -> np.ndarray:
        return self._axis(self.theta_start, self.theta_end, self.theta_step)


@dataclass(frozen=True, eq=False)
class EllipseSamples:
    """Delta J_y and Delta J_z of the rotated state for every theta of the grid."""
    theta_deg: np.ndarray
    delta_y: np.ndarray
    delta_z: np.ndarray
    j_mag: float

    def normalized(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.j_mag <= 0.0:
            return np.full_like(self.delta_y, np.inf), np.full_like(self.delta_z, np.inf)
        return self.delta_y / self.j_mag, self.delta_z / self.j_mag


@dataclass(frozen=True)
class SqueezingPoint:
    tau: float
    j_exp: Tuple[float, float, float]
    j_mag: float
    delta_b: float
    delta_a: float
    theta_opt: float
    sigma_b: float
    sigma_a: float
    entropy: Tuple[float, ...]
    degenerate: bool
    ellipse: Optional[EllipseSamples] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SweepSummary:
    """Optimum of a tau sweep.

    sigma_min is the sigma_b of the earliest dip lying within dip_tol of the
    smallest non-degenerate sigma_b, so it may exceed that minimum by up to
    dip_tol. The unguarded grid minimum is kept in sigma_min_raw.
    """
    sigma_min: float
    tau_min: float
    theta_min: float
    sigma_a_min: float
    sigma_0: float
    n_spins: int
    grid: SweepGrid
    observable_mode: ObservableMode
    j_initial: float
    sigma_min_raw: float
    tau_min_raw: float
    entropy_at_tau_min: Tuple[float, ...]
    squeezing_windows: Tuple[Tuple[float, float], ...]
    n_degenerate: int

    @property
    def ratio(self) -> float:
        return self.sigma_min / self.sigma_0

    @property
    def squeezed(self) -> bool:
        return bool(self.sigma_min < self.sigma_0 - NUMERICS_CONFIG['dip_tol'])

