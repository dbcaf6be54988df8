"""Exception hierarchy shared by all modules."""


class ConformFairError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(ConformFairError, ValueError):
    pass


class UnsupportedMulticlassError(ConformFairError, ValueError):
    pass


class EmptyDatasetError(ConformFairError, ValueError):
    pass


class DatasetTooSmallError(ConformFairError, ValueError):
    pass


class InsufficientDataError(ConformFairError, ValueError):
    """Too few tuples to profile or estimate a density."""


class InsufficientGroupDataError(InsufficientDataError):
    """A (group, label) cell is empty or too small.

    ``cell`` holds the offending ``(group, label)`` pair when known.
    """

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class NumericalError(ConformFairError, ArithmeticError):
    pass


class ShapeError(ConformFairError, ValueError):
    pass


class EmptyFamilyError(ConformFairError, ValueError):
    pass


class DegenerateLabelsError(ConformFairError, ValueError):
    pass


class InvalidWeightError(ConformFairError, ValueError):
    pass


class MissingGroupError(ConformFairError, ValueError):
    pass


class ConfigError(ConformFairError, ValueError):
    pass


class ExperimentError(ConformFairError, RuntimeError):
    """A stage of the experiment harness failed; ``stage`` names it."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
