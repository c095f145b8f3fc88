"""Data ingestion, synthetic benchmarks, experiment runner and CLI."""

from .data import LibsvmParseError, SparseExample, load_libsvm, normalize_l2, parse_libsvm
from .experiments import (
    ConfigError,
    ExperimentConfig,
    RegretTrace,
    run_coin_game,
    run_experiment,
    run_lea_experiment,
    run_olo_experiment,
    write_traces,
)
from .hadamard import ExpertsStream, hadamard_experts, sylvester_hadamard
