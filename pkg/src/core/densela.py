# src/core/densela.py

"""Dense complex linear algebra for spin Hilbert spaces of dimension 2^N.

Everything here is a pure function of immutable inputs, so callers may
evaluate it concurrently across grid points.
"""

from functools import reduce
from typing import Tuple, Union

import numpy as np
import scipy.linalg as la
from scipy.special import entr

from config.settings import NUMERICS_CONFIG
from src.core.errors import (
    DimensionMismatch,
    NegativeVariance,
    NonRealExpectation,
    SiteOutOfRange,
    ValidationError,
)
from src.core.models import (
    DensityMatrix,
    EigenSystem,
    HermitianOperator,
    QuantumState,
    n_spins_for_dim,
)

MatrixLike = Union[HermitianOperator, np.ndarray]


def _as_matrix(a: MatrixLike) -> np.ndarray:
    return a.matrix if isinstance(a, HermitianOperator) else np.asarray(a)


def kron(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    return np.kron(_as_matrix(a), _as_matrix(b))


def kron_all(*factors: MatrixLike) -> np.ndarray:
    return reduce(kron, factors)


def eig_hermitian(h: Union[HermitianOperator, np.ndarray]) -> EigenSystem:
    """Ascending eigenvalues and unitary eigenvectors (columns) of h.

    Raw arrays are validated through HermitianOperator, which raises
    NonHermitianInput.
    """
    op = h if isinstance(h, HermitianOperator) else HermitianOperator(h)
    eigenvalues, eigenvectors = la.eigh(op.matrix)
    return EigenSystem(eigenvalues, eigenvectors)


def _check_dim(dim: int, psi: QuantumState) -> None:
    if dim != psi.dim:
        raise DimensionMismatch(f"operator dimension {dim} != state dimension {psi.dim}")


def propagate(amplitudes: np.ndarray, eig: EigenSystem, t: float) -> np.ndarray:
    """V exp(-i Lambda t) V^dagger applied to a raw vector (or to the columns of a matrix)."""
    v = eig.eigenvectors
    phases = np.exp(-1j * eig.eigenvalues * t)
    coeffs = v.conj().T @ amplitudes
    if coeffs.ndim == 1:
        return v @ (phases * coeffs)
    return v @ (phases[:, None] * coeffs)


def evolve(psi0: QuantumState, eig: EigenSystem, tau: float) -> QuantumState:
    """exp(-i H tau)|psi0> for the time-independent H diagonalized by eig."""
    _check_dim(eig.dim, psi0)
    if tau < 0:
        raise ValidationError(f"tau must be >= 0, got {tau}")
    return QuantumState(propagate(psi0.amplitudes, eig, tau), psi0.n_spins)


def _real_part(values: np.ndarray) -> np.ndarray:
    imag = np.max(np.abs(np.imag(values))) if np.size(values) else 0.0
    if imag > NUMERICS_CONFIG['imag_tol']:
        raise NonRealExpectation(f"expectation has imaginary part {imag:.3e}")
    return np.real(values)


def _clamped_sqrt(variance: np.ndarray) -> np.ndarray:
    clamp = NUMERICS_CONFIG['variance_clamp']
    worst = np.min(variance) if np.size(variance) else 0.0
    if worst < -clamp:
        raise NegativeVariance(f"variance {worst:.3e} below round-off tolerance")
    return np.sqrt(np.maximum(variance, 0.0))


def expectation(psi: QuantumState, a: MatrixLike) -> float:
    m = _as_matrix(a)
    _check_dim(m.shape[0], psi)
    return float(_real_part(np.vdot(psi.amplitudes, m @ psi.amplitudes)))


def uncertainty(psi: QuantumState, a: MatrixLike) -> float:
    """sqrt(<A^2> - <A>^2), with <A^2> taken as |A psi|^2 for Hermitian A."""
    m = _as_matrix(a)
    _check_dim(m.shape[0], psi)
    a_psi = m @ psi.amplitudes
    mean = float(_real_part(np.vdot(psi.amplitudes, a_psi)))
    second = float(np.vdot(a_psi, a_psi).real)
    return float(_clamped_sqrt(np.array(second - mean ** 2)))


def moments_batch(states: np.ndarray, a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Means and standard deviations of Hermitian a for each column of states."""
    a_states = a @ states
    means = _real_part(np.einsum('ij,ij->j', states.conj(), a_states))
    second = np.einsum('ij,ij->j', a_states.conj(), a_states).real
    return means, _clamped_sqrt(second - means ** 2)


def partial_trace_site(rho: DensityMatrix, site: int) -> DensityMatrix:
    """2x2 reduced density matrix of a 1-based site, tracing out all others."""
    n = rho.n_spins
    if not 1 <= site <= n:
        raise SiteOutOfRange(f"site {site} outside 1..{n}")
    left, right = 2 ** (site - 1), 2 ** (n - site)
    blocks = rho.matrix.reshape(left, 2, right, left, 2, right)
    return DensityMatrix(np.einsum('aibajb->ij', blocks))


def reduced_density_from_state(psi: QuantumState, site: int) -> DensityMatrix:
    """Same result as partial_trace_site(|psi><psi|, site) without forming rho."""
    n = psi.n_spins
    if not 1 <= site <= n:
        raise SiteOutOfRange(f"site {site} outside 1..{n}")
    amps = psi.amplitudes.reshape(2 ** (site - 1), 2, 2 ** (n - site))
    return DensityMatrix(np.einsum('aib,ajb->ij', amps, amps.conj()))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho ln rho), natural log, 0 ln 0 := 0."""
    eigenvalues = np.clip(la.eigvalsh(rho.matrix), 0.0, 1.0)
    return float(np.sum(entr(eigenvalues)))


def site_entropies(psi: QuantumState) -> Tuple[float, ...]:
    return tuple(von_neumann_entropy(reduced_density_from_state(psi, i))
                 for i in range(1, psi.n_spins + 1))


def commutator(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    ma, mb = _as_matrix(a), _as_matrix(b)
    return ma @ mb - mb @ ma


__all__ = [
    'kron', 'kron_all', 'eig_hermitian', 'evolve', 'propagate', 'expectation',
    'uncertainty', 'moments_batch', 'partial_trace_site', 'reduced_density_from_state',
    'von_neumann_entropy', 'site_entropies', 'commutator', 'n_spins_for_dim',
]
