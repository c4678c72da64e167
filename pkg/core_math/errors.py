"""
Exception types shared by every lab module
"""


class LabError(Exception):
    """Base class for all lab failures (mapped to CLI exit code 3)"""


class DimensionError(LabError):
    """Vector or operator has the wrong size (e.g. a non-power-of-two table)"""


class DomainError(LabError):
    """Scalar argument outside the range where the quantity is defined"""


class ValidationError(LabError):
    """Input object violates its documented invariants"""


class CapacityError(LabError):
    """Exhaustive enumeration requested over a domain that is too large"""


class EncodingError(LabError):
    """Value cannot be represented by a codec"""
