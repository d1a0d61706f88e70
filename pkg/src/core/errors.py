# src/core/errors.py

class SpinSimError(Exception):
    """Base class for every failure raised by the simulator."""


class ConfigError(SpinSimError, ValueError):
    """Invalid input: configuration, scenario or geometry."""


class NumericalError(SpinSimError):
    """A numerical invariant was violated during the simulation."""


class ResultsIoError(SpinSimError, OSError):
    """Result files could not be written or were refused before writing."""


class SchemaError(ConfigError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(ConfigError):
    pass


class InvalidN(ConfigError):
    pass


class SiteOutOfRange(ConfigError):
    pass


class AsymmetricCouplings(ValidationError):
    pass


class CoincidentPositions(ConfigError):
    pass


class EmptyGrid(ConfigError):
    pass


class NonHermitianInput(NumericalError):
    pass


class DimensionMismatch(NumericalError):
    pass


class NonRealExpectation(NumericalError):
    pass


class NegativeVariance(NumericalError):
    pass


class InvalidDensityMatrix(NumericalError):
    pass


class AllPointsDegenerate(NumericalError):
    pass


class ThetaDependentMean(NumericalError):
    pass
