"""Exception hierarchy shared by all modules."""


class LowRankError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(LowRankError):
    """Operands have incompatible shapes."""


class ParameterError(LowRankError):
    """A parameter is outside its valid range."""


class NumericalError(LowRankError):
    """Non-finite input or a failed numerical routine."""
