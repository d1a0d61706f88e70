# src/scenarios/uniform_scenario.py

import numpy as np

from config.settings import SCENARIO_CONFIG
from src.core.errors import InvalidN, ValidationError
from src.core.models import ObservableMode, SpinSystemSpec
from .base_scenario import BaseScenario

class UniformScenario(BaseScenario):
    """All pairs share one coupling d_ij/(2 pi) = d_mhz."""
    kind = 'uniform'

    def __init__(self, n_spins: int = SCENARIO_CONFIG['uniform']['n_spins'],
                 d_mhz: float = SCENARIO_CONFIG['uniform']['d_mhz'],
                 tau_end_ns: float = SCENARIO_CONFIG['uniform']['tau_end_ns']):
        if not isinstance(n_spins, (int, np.integer)) or n_spins < 2:
            raise InvalidN(f"uniform scenario needs n >= 2, got {n_spins}")
        if not np.isfinite(d_mhz):
            raise ValidationError(f"d_mhz must be finite, got {d_mhz}")
        self.n_spins = int(n_spins)
        self.d_mhz = float(d_mhz)
        self.tau_end_ns = tau_end_ns

    def build_spec(self) -> SpinSystemSpec:
        couplings = np.full((self.n_spins, self.n_spins), self.d_mhz)
        np.fill_diagonal(couplings, 0.0)
        return SpinSystemSpec(self.n_spins, couplings, ObservableMode.collective())


def scenario_uniform(n: int, d_mhz: float) -> SpinSystemSpec:
    return UniformScenario(n, d_mhz).build_spec()
