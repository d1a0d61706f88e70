# src/scenarios/chain_scenario.py

import numpy as np

from config.settings import SCENARIO_CONFIG
from src.core.models import ObservableMode, SpinSystemSpec
from .base_scenario import BaseScenario

class ChainScenario(BaseScenario):
    """Central spin 1 coupled to spins 2 and 3, which do not couple to each other.

    Models an NV centre with two neighbouring electron spins; single_site(1)
    measures the NV spin alone.
    """
    kind = 'chain'
    tau_end_ns = SCENARIO_CONFIG['chain']['tau_end_ns']

    def __init__(self, observable_mode: ObservableMode = ObservableMode.collective()):
        config = SCENARIO_CONFIG['chain']
        self.d12 = config['d12_mhz']
        self.d13 = config['d13_mhz']
        self.observable_mode = observable_mode

    def build_spec(self) -> SpinSystemSpec:
        couplings = np.array([
            [0.0, self.d12, self.d13],
            [self.d12, 0.0, 0.0],
            [self.d13, 0.0, 0.0],
        ])
        return SpinSystemSpec(3, couplings, self.observable_mode)


def scenario_chain(observable_mode: ObservableMode = ObservableMode.collective()) -> SpinSystemSpec:
    return ChainScenario(observable_mode).build_spec()
