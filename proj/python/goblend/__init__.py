"""Go-Blend exploration experiments: deterministic racing environment,
k-NN arousal surrogate, archive search and evaluation metrics."""

from goblend._core import (
    ConfigError,
    ContractViolation,
    Dataset,
    Environment,
    InsufficientDataError,
    ParseError,
    ccc,
    derive_run_seed,
    generate_synthetic,
    pearson,
    random_baseline,
    run_experiment,
    similarity,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "Dataset",
    "Environment",
    "InsufficientDataError",
    "ParseError",
    "ccc",
    "derive_run_seed",
    "generate_synthetic",
    "pearson",
    "random_baseline",
    "run_experiment",
    "similarity",
]
