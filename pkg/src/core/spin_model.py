# src/core/spin_model.py

from functools import lru_cache
from typing import Dict

import numpy as np
from scipy import constants

from src.core.densela import kron_all
from src.core.errors import CoincidentPositions, InvalidN, SiteOutOfRange, ValidationError
from src.core.models import (
    GeometrySpec,
    HermitianOperator,
    ObservableMode,
    QuantumState,
    SpinSystemSpec,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

# Spin-1/2 matrices sigma/2 (hbar = 1); basis order |0> = |up>, |1> = |down>
SPIN_HALF: Dict[str, np.ndarray] = {
    'x': 0.5 * np.array([[0, 1], [1, 0]], dtype=complex),
    'y': 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': 0.5 * np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY = np.eye(2, dtype=complex)

# (mu_0 / 4 pi) * h * (1 GHz/T)^2 / (1 nm)^3 expressed in MHz
DIPOLAR_PREFACTOR_MHZ = (constants.mu_0 / (4 * np.pi)) * constants.h * 1e18 / 1e-27 / 1e6


def mhz_to_rad_per_ns(d_mhz):
    """d [rad/ns] = 2 pi * 1e-3 * (d / 2 pi) [MHz]."""
    return 2 * np.pi * 1e-3 * np.asarray(d_mhz, dtype=float)


def _check_axis(axis: str) -> None:
    if axis not in SPIN_HALF:
        raise ValidationError(f"axis must be one of x, y, z, got '{axis}'")


def _embed(n: int, slots: Dict[int, np.ndarray]) -> np.ndarray:
    return kron_all(*[slots.get(k, IDENTITY) for k in range(n)])


@lru_cache(maxsize=None)
def _site_matrix(n: int, i: int, axis: str) -> np.ndarray:
    m = _embed(n, {i - 1: SPIN_HALF[axis]})
    m.setflags(write=False)
    return m


def site_operator(n: int, i: int, axis: str) -> HermitianOperator:
    """S_axis^i = I x ... x sigma_axis/2 x ... x I with the spin at 1-based slot i."""
    _check_axis(axis)
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    if not 1 <= i <= n:
        raise SiteOutOfRange(f"site {i} outside 1..{n}")
    return HermitianOperator(_site_matrix(n, i, axis))


@lru_cache(maxsize=None)
def _collective_matrix(n: int, axis: str) -> np.ndarray:
    m = sum(_site_matrix(n, i, axis) for i in range(1, n + 1))
    m.setflags(write=False)
    return m


def collective_operator(n: int, axis: str) -> HermitianOperator:
    """J_axis = sum_i S_axis^i."""
    _check_axis(axis)
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    return HermitianOperator(_collective_matrix(n, axis))


def observable_operators(n: int, mode: ObservableMode) -> Dict[str, HermitianOperator]:
    """The x, y, z observables measured in the given mode."""
    if mode.is_collective:
        return {axis: collective_operator(n, axis) for axis in 'xyz'}
    return {axis: site_operator(n, mode.site, axis) for axis in 'xyz'}


def secular_hamiltonian(spec: SpinSystemSpec) -> HermitianOperator:
    """Rotating-frame secular dipolar Hamiltonian in rad/ns.

    H_r = sum_{i<j} d_ij [S_z^i S_z^j - 1/2 (S_x^i S_x^j + S_y^i S_y^j)]
    """
    n = spec.n_spins
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for i, j, d_mhz in spec.pair_couplings():
        zz = _embed(n, {i: SPIN_HALF['z'], j: SPIN_HALF['z']})
        xx = _embed(n, {i: SPIN_HALF['x'], j: SPIN_HALF['x']})
        yy = _embed(n, {i: SPIN_HALF['y'], j: SPIN_HALF['y']})
        h += mhz_to_rad_per_ns(d_mhz) * (zz - 0.5 * (xx + yy))
    logger.debug(f"Built secular Hamiltonian for N={n} with {len(spec.pair_couplings())} coupled pairs")
    return HermitianOperator(h)


def dipolar_coupling(geom: GeometrySpec, i: int, j: int) -> float:
    """d_ij/(2 pi) in MHz for 1-based spins i != j.

    (mu_0/4 pi) h gamma_i gamma_j |S|^2 (3 cos^2 theta - 1) / r^3, with theta the
    angle between the field axis and the i-j displacement.
    """
    n = geom.n_spins
    if not (1 <= i <= n and 1 <= j <= n):
        raise SiteOutOfRange(f"spins ({i}, {j}) outside 1..{n}")
    if i == j:
        raise CoincidentPositions(f"a spin does not couple to itself (i = j = {i})")
    r_vec = geom.positions[j - 1] - geom.positions[i - 1]
    r = np.linalg.norm(r_vec)
    if r == 0.0:
        raise CoincidentPositions(f"spins {i} and {j} share a position")
    cos_theta = np.dot(r_vec, geom.field_axis) / r
    angular = 3.0 * cos_theta ** 2 - 1.0
    if abs(angular) < 1e-12:
        angular = 0.0  # magic angle
    gammas = geom.gyromagnetic_ratios
    return float(DIPOLAR_PREFACTOR_MHZ * gammas[i - 1] * gammas[j - 1]
                 * geom.spin_magnitude ** 2 * angular / r ** 3)


def coupling_matrix(geom: GeometrySpec) -> np.ndarray:
    n = geom.n_spins
    d = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            d[i - 1, j - 1] = d[j - 1, i - 1] = dipolar_coupling(geom, i, j)
    return d


def spec_from_geometry(geom: GeometrySpec,
                       mode: ObservableMode = ObservableMode.collective()) -> SpinSystemSpec:
    return SpinSystemSpec(geom.n_spins, coupling_matrix(geom), mode)


def coherent_state(n: int) -> QuantumState:
    """Every spin along +x: (|0> + |1>)/sqrt(2) on each site."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    return QuantumState(np.full(2 ** n, 2.0 ** (-n / 2), dtype=complex), n)
