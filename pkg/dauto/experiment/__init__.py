"""Experiment runners behind the command line."""

from dauto.experiment.runner import (
    MethodResult,
    RunReport,
    build_dataset,
    run_digit_matrix,
    run_experiment,
    run_fraction_sweep,
)

__all__ = [
    "MethodResult",
    "RunReport",
    "build_dataset",
    "run_digit_matrix",
    "run_experiment",
    "run_fraction_sweep",
]
