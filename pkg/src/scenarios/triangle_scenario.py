# src/scenarios/triangle_scenario.py

import numpy as np

from config.settings import SCENARIO_CONFIG
from src.core.models import ObservableMode, SpinSystemSpec
from .base_scenario import BaseScenario

class TriangleScenario(BaseScenario):
    """Three co-aligned spins on a right triangle, encoded by their couplings.

    d_12 is fixed by the geometry choice; the two legs to spin 3 share d_13 = d_23.
    """
    kind = 'triangle'
    tau_end_ns = SCENARIO_CONFIG['triangle']['tau_end_ns']

    def __init__(self):
        config = SCENARIO_CONFIG['triangle']
        self.d12 = config['d12_mhz']
        self.d13 = config['d13_mhz']
        self.d23 = config['d23_mhz']

    def build_spec(self) -> SpinSystemSpec:
        couplings = np.array([
            [0.0, self.d12, self.d13],
            [self.d12, 0.0, self.d23],
            [self.d13, self.d23, 0.0],
        ])
        return SpinSystemSpec(3, couplings, ObservableMode.collective())


def scenario_triangle() -> SpinSystemSpec:
    return TriangleScenario().build_spec()
