"""Pydantic schemas for configuration validation."""

from mortcast.schemas.experiment import (
    ExperimentConfig,
    build_experiment_config,
    load_experiment_config,
    parse_config_text,
)

__all__ = [
    "ExperimentConfig",
    "build_experiment_config",
    "load_experiment_config",
    "parse_config_text",
]
