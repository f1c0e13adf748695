"""Settings management for link physics, simulation and runtime defaults.

Loads ``config/settings.yaml`` and environment overrides (optionally from a
.env file).
"""

import logging
import os
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigurationError
from .models import (
    DesignSettings,
    LinkParams,
    QuantConfig,
    SimulationSettings,
    TrainConfig,
)

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).parent.parent.parent
DEFAULT_SETTINGS_PATH = PROJECT_ROOT / "config" / "settings.yaml"


class RuntimeSettings(BaseModel):
    """Process-level knobs."""

    threads: int = Field(default=1, ge=1)
    commit: str | None = None
    parallelism: int = Field(default=96, ge=1)
    clock_hz: float = Field(default=416.7e6, gt=0)

    model_config = ConfigDict(frozen=True, extra="forbid")


class Settings(BaseModel):
    """All defaults, one section per concern."""

    link: LinkParams = LinkParams()
    simulation: SimulationSettings = SimulationSettings()
    design: DesignSettings = DesignSettings()
    quantization: QuantConfig = QuantConfig()
    training: TrainConfig = TrainConfig()
    runtime: RuntimeSettings = RuntimeSettings()

    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Settings":
        try:
            return cls.model_validate(data)
        except PydanticValidationError as e:
            first = e.errors()[0]
            key = ".".join(str(part) for part in first["loc"]) or "settings"
            raise ConfigurationError(key, first["msg"]) from e

    @classmethod
    def load(
        cls,
        path: Optional[Path] = None,
        env_file: Optional[Path] = None,
    ) -> "Settings":
        """
        Load settings from YAML, then apply environment overrides.

        Args:
            path: Settings file. Defaults to $TDDBP_SETTINGS or
                  config/settings.yaml in the project root.
            env_file: Optional .env file. If not provided, looks for .env
                      in the project root.

        Returns:
            Settings instance
        """
        # Try to load .env file if python-dotenv is available
        try:
            from dotenv import load_dotenv

            if env_file:
                load_dotenv(env_file)
            else:
                env_path = PROJECT_ROOT / ".env"
                if env_path.exists():
                    load_dotenv(env_path)
        except ImportError:
            pass

        settings_path = Path(path or os.getenv("TDDBP_SETTINGS") or DEFAULT_SETTINGS_PATH)
        data: dict[str, Any] = {}
        if settings_path.exists():
            with open(settings_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
            logger.debug(f"Loaded settings from {settings_path}")
        elif path is not None:
            raise ConfigurationError("settings", f"file not found: {settings_path}")
        else:
            logger.debug(f"No settings file at {settings_path}, using built-in defaults")

        runtime = dict(data.get("runtime") or {})
        if threads := os.getenv("TDDBP_THREADS"):
            try:
                runtime["threads"] = int(threads)
            except ValueError:
                raise ConfigurationError("TDDBP_THREADS", f"not an integer: {threads!r}")
        if commit := os.getenv("TDDBP_COMMIT"):
            runtime["commit"] = commit
        data["runtime"] = runtime

        return cls.from_dict(data)

    @property
    def commit_stamp(self) -> str:
        """Provenance tag written to every result row."""
        from .. import __version__

        return self.runtime.commit or f"v{__version__}"


# Global settings instance (lazy loaded)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings.load()
    return _settings


def reload_settings(path: Optional[Path] = None, env_file: Optional[Path] = None) -> Settings:
    """Reload settings from disk and environment."""
    global _settings
    _settings = Settings.load(path, env_file)
    return _settings
