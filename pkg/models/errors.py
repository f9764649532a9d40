"""Exception hierarchy for the probabilistic metrizability toolkit."""
from typing import Any, Dict, Optional


class ToolkitError(Exception):
    """Root of every error raised by the library."""


class SchemaError(ToolkitError, ValueError):
    """An input document does not match its schema."""

    def __init__(self, message: str, field: str = "", source: Optional[str] = None):
        self.field = field
        self.source = source
        location = ""
        if source:
            location += f"{source}: "
        if field:
            location += f"field '{field}': "
        super().__init__(f"{location}{message}")


class InvalidTNormError(ToolkitError, ValueError):
    """Ordinal-sum data that does not describe a continuous t-norm."""


class InvalidDistributionError(ToolkitError, ValueError):
    """Plateau data that is not a monotone distribution, or an unsupported variant."""


class PlateauLimitError(ToolkitError, RuntimeError):
    """A convolution would exceed the configured plateau cap."""


class CarrierSizeError(ToolkitError, ValueError):
    """A carrier is larger than the configured cap for an operation."""


class AxiomViolationError(ToolkitError, ValueError):
    """A space does not satisfy the axioms a caller requires."""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class TransformError(ToolkitError, ValueError):
    """Preconditions of a re-metrization transform do not hold."""


class GeneratorError(ToolkitError, RuntimeError):
    """A seeded generator exhausted its resample budget."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)
