"""Exception hierarchy. The CLI maps the four top branches to exit codes."""


class FairembedError(Exception):
    pass


class ConfigError(FairembedError):
    """Bad run configuration (unknown keys, invalid values, duplicate sweep points)."""


class DataError(FairembedError):
    """Bad input data."""


class ParseError(DataError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class SchemaError(DataError):
    """Input parses but violates the format's schema (e.g. non-integer rating)."""


class CompletenessError(DataError):
    """Attribute table does not cover every node of the sensitive type."""


class NodeTypeError(DataError):
    """A node is used in a role its type does not allow."""


class NumericError(FairembedError):
    """Non-finite values where finite ones are required (inputs or diverged training)."""


class ShapeError(FairembedError, ValueError):
    pass


class StateError(FairembedError, RuntimeError):
    """Operation called out of order (e.g. backward without a forward)."""


class GradCheckError(FairembedError):
    """The function under test is not deterministic under a fixed seed."""


class DegenerateSplitError(FairembedError):
    """Probe split has a single class in test even after reseeding."""


class DegenerateInputError(FairembedError):
    """Metric input admits no answer (e.g. one-class AUC)."""


class CompatibilityError(FairembedError):
    """Checkpoint and dataset (or format versions) do not match."""
