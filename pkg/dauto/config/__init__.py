"""Configuration module for dauto."""

from dauto.config.loader import (
    ConfigValidationError,
    config_text,
    load_config,
    resolve_config,
    save_config,
    validate_experiment,
)
from dauto.config.schema import (
    ALL_MODES,
    ArchitectureConfig,
    ExperimentConfig,
    Mode,
    SyntheticSpec,
    TrainConfig,
)

__all__ = [
    "ALL_MODES",
    "ArchitectureConfig",
    "ConfigValidationError",
    "ExperimentConfig",
    "Mode",
    "SyntheticSpec",
    "TrainConfig",
    "config_text",
    "load_config",
    "resolve_config",
    "save_config",
    "validate_experiment",
]
