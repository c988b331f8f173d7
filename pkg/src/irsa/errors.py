"""Exception hierarchy shared by the simulator and analysis code."""


class IRSAError(ValueError):
    """Base class for every error raised by this package."""


class NotNormalized(IRSAError):
    pass


class NegativeProbability(IRSAError):
    pass


class ZeroDegree(IRSAError):
    pass


class ZeroTotalLoad(IRSAError):
    pass


class LengthMismatch(IRSAError):
    pass


class DegreeExceedsFrame(IRSAError):
    pass


class EmptyFrame(IRSAError):
    pass


class InconsistentLoad(IRSAError):
    pass


class CountExceedsPopulation(IRSAError):
    pass


class DecodedNotActivated(IRSAError):
    pass


class LoadExceedsPopulation(IRSAError):
    pass


class OutsideRegion(IRSAError):
    pass


class ExceedsThreshold(IRSAError):
    pass


class NotTwoDimensional(IRSAError):
    pass


class ParseError(IRSAError):
    pass


class ValidationError(IRSAError):
    """Invalid configuration value; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
