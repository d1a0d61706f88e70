# src/scenarios/base_scenario.py
from abc import ABC, abstractmethod

from config.settings import DEFAULT_TAU_STEP_NS, DEFAULT_THETA_END_DEG, DEFAULT_THETA_STEP_DEG
from src.core.models import SpinSystemSpec, SweepGrid

class BaseScenario(ABC):
    kind: str = ''
    tau_end_ns: float = 650.0

    @abstractmethod
    def build_spec(self) -> SpinSystemSpec:
        """Construct the spin system this scenario describes."""
        pass

    def default_grid(self) -> SweepGrid:
        return SweepGrid(0.0, self.tau_end_ns, DEFAULT_TAU_STEP_NS,
                         0.0, DEFAULT_THETA_END_DEG, DEFAULT_THETA_STEP_DEG)
