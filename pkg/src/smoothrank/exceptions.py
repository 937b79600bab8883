"""Exception types raised by smoothrank."""


class SmoothRankError(Exception):
    """Base class for all package errors."""


class DataError(SmoothRankError, ValueError):
    """Input data is malformed or unusable (maps to CLI exit code 2)."""


class ModelFormatError(DataError):
    """A model file is corrupted or does not follow the model schema."""


class ModelVersionError(ModelFormatError):
    """A model file was written with an unsupported format version."""


class NumericalError(SmoothRankError, ArithmeticError):
    """A numerical routine failed on otherwise valid input (exit code 3)."""
