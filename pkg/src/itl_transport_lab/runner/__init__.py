"""
Configuration-driven experiment runner.
"""
from itl_transport_lab.runner.artifacts import ExperimentResult, run_metadata
from itl_transport_lab.runner.config import (
    ExperimentConfig,
    config_from_mapping,
    config_hash,
    parse_config,
    serialize_config,
)
from itl_transport_lab.runner.experiments import density_model, run_experiment
from itl_transport_lab.runner.registry import ExperimentRegistry, experiment_registry

__all__ = [
    "ExperimentResult",
    "run_metadata",
    "ExperimentConfig",
    "config_from_mapping",
    "config_hash",
    "parse_config",
    "serialize_config",
    "density_model",
    "run_experiment",
    "ExperimentRegistry",
    "experiment_registry",
]
