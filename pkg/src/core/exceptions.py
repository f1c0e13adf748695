"""Custom exceptions for the TD-DBP toolkit."""


class TdDbpError(Exception):
    """Base exception for all TD-DBP toolkit errors."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ValidationError(TdDbpError):
    """Raised when an argument or record violates a precondition."""

    def __init__(self, field: str, value: object, reason: str):
        message = f"Validation failed for {field}={value}: {reason}"
        super().__init__(message, {"field": field, "value": str(value), "reason": reason})
        self.field = field
        self.value = value
        self.reason = reason


class ConfigurationError(TdDbpError):
    """Raised when settings are invalid or missing."""

    def __init__(self, config_key: str, message: str):
        full_message = f"Configuration error [{config_key}]: {message}"
        super().__init__(full_message, {"config_key": config_key})
        self.config_key = config_key


class ConstellationError(TdDbpError):
    """Raised for an empty or malformed constellation."""


class PulseShapeError(TdDbpError):
    """Raised when the pulse-shaping filter span truncates too much energy."""

    def __init__(self, span_symbols: int, tail_energy: float, limit: float):
        message = (
            f"RRC span of {span_symbols} symbols leaves tail energy {tail_energy:.3e} "
            f"(limit {limit:.1e})"
        )
        super().__init__(
            message,
            {"span_symbols": span_symbols, "tail_energy": tail_energy, "limit": limit},
        )
        self.span_symbols = span_symbols
        self.tail_energy = tail_energy


class MetricError(TdDbpError):
    """Raised when a quality metric is undefined for its inputs."""


class AliasingError(TdDbpError):
    """Raised when a waveform carries significant energy at the band edge."""

    def __init__(self, edge_fraction: float, limit: float):
        message = f"Band-edge energy fraction {edge_fraction:.3e} exceeds {limit:.1e}; raise the sample rate"
        super().__init__(message, {"edge_fraction": edge_fraction, "limit": limit})
        self.edge_fraction = edge_fraction


class FilterDesignError(TdDbpError):
    """Raised when a CD filter cannot be designed under the given constraints."""


class SerializationError(TdDbpError):
    """Raised when a filter-bank document fails schema validation."""

    def __init__(self, source: str, message: str):
        full_message = f"[{source}] {message}"
        super().__init__(full_message, {"source": source})
        self.source = source


class DbpError(TdDbpError):
    """Raised when the DBP datapath cannot run on the given signal."""


class ScalingError(TdDbpError):
    """Raised when a fixed-point stage cannot be scaled."""

    def __init__(self, stage: int, message: str):
        full_message = f"Stage {stage}: {message}"
        super().__init__(full_message, {"stage": stage})
        self.stage = stage


class QuantizationError(TdDbpError):
    """Raised when a value or filter cannot be quantized."""


class GradientError(TdDbpError):
    """Raised when back-propagated gradients become non-finite."""

    def __init__(self, stage: str, iteration: int | None = None):
        message = f"Non-finite gradient at {stage}"
        if iteration is not None:
            message += f" (iteration {iteration})"
        super().__init__(message, {"stage": stage, "iteration": iteration})
        self.stage = stage
        self.iteration = iteration


class TrainingDivergedError(TdDbpError):
    """Raised when training stays far below its starting quality."""

    def __init__(self, iteration: int, reference_db: float, current_db: float):
        message = (
            f"Training diverged at iteration {iteration}: effective SNR {current_db:.2f} dB "
            f"vs {reference_db:.2f} dB at start"
        )
        super().__init__(
            message,
            {"iteration": iteration, "reference_db": reference_db, "current_db": current_db},
        )
        self.iteration = iteration


class DegenerateBatchError(TdDbpError):
    """Raised when a training batch carries no signal power."""


class SpecError(TdDbpError):
    """Raised when an experiment spec violates its schema."""

    exit_code = 2

    def __init__(self, path: str, message: str):
        full_message = f"Invalid experiment spec {path}: {message}"
        super().__init__(full_message, {"path": path})
        self.path = path


class CellFailure(TdDbpError):
    """Raised after a sweep in which one or more cells failed numerically."""

    exit_code = 3

    def __init__(self, failed: list[str]):
        message = f"{len(failed)} sweep cell(s) failed: {', '.join(failed[:5])}"
        if len(failed) > 5:
            message += ", ..."
        super().__init__(message, {"failed": failed})
        self.failed = failed


class CompareError(TdDbpError):
    """Raised when result sets cannot be compared."""
