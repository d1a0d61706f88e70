# src/scenarios/custom_scenario.py

from typing import Optional

import numpy as np

from config.settings import SCENARIO_CONFIG
from src.core.errors import ValidationError
from src.core.models import GeometrySpec, ObservableMode, SpinSystemSpec
from src.core.spin_model import coupling_matrix
from .base_scenario import BaseScenario

class CustomScenario(BaseScenario):
    """Couplings given directly as a matrix (MHz) or derived from spin positions."""
    kind = 'custom'
    tau_end_ns = SCENARIO_CONFIG['custom']['tau_end_ns']

    def __init__(self, matrix: Optional[np.ndarray] = None,
                 geometry: Optional[GeometrySpec] = None,
                 observable_mode: ObservableMode = ObservableMode.collective()):
        if (matrix is None) == (geometry is None):
            raise ValidationError("custom scenario needs exactly one of matrix or geometry")
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.geometry = geometry
        self.observable_mode = observable_mode

    def build_spec(self) -> SpinSystemSpec:
        couplings = self.matrix if self.geometry is None else coupling_matrix(self.geometry)
        return SpinSystemSpec(couplings.shape[0], couplings, self.observable_mode)
