"""Core module - data models, types, settings and exceptions."""

from .models import (
    ComplexSignal,
    Constellation,
    Metrics,
    LinkParams,
    SsfmPlan,
    SimulationSettings,
    DesignSettings,
    FixedFormat,
    QuantConfig,
    FirFilter,
    FilterBank,
    QuantizedFilter,
    QuantizedFilterBank,
    DbpConfig,
    CostModel,
    CostReport,
    CrossoverReport,
    TrainConfig,
    VariantSpec,
    ExperimentSpec,
)
from .types import (
    Arithmetic,
    BankSource,
    ComplexMultiplier,
    DesignMethod,
    FftCostModel,
    Nonlinearity,
    RoundingMode,
    SsfmScheme,
    TaylorSign,
    SNR_CAP_DB,
)
from .exceptions import (
    TdDbpError,
    ValidationError,
    ConfigurationError,
    SpecError,
    CellFailure,
)
from .config import Settings, get_settings, reload_settings

__all__ = [
    # Models
    "ComplexSignal",
    "Constellation",
    "Metrics",
    "LinkParams",
    "SsfmPlan",
    "SimulationSettings",
    "DesignSettings",
    "FixedFormat",
    "QuantConfig",
    "FirFilter",
    "FilterBank",
    "QuantizedFilter",
    "QuantizedFilterBank",
    "DbpConfig",
    "CostModel",
    "CostReport",
    "CrossoverReport",
    "TrainConfig",
    "VariantSpec",
    "ExperimentSpec",
    # Types
    "Arithmetic",
    "BankSource",
    "ComplexMultiplier",
    "DesignMethod",
    "FftCostModel",
    "Nonlinearity",
    "RoundingMode",
    "SsfmScheme",
    "TaylorSign",
    "SNR_CAP_DB",
    # Exceptions
    "TdDbpError",
    "ValidationError",
    "ConfigurationError",
    "SpecError",
    "CellFailure",
    # Settings
    "Settings",
    "get_settings",
    "reload_settings",
]
