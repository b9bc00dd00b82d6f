"""Experiment harness: configs, runner, records, slope fits, CLI."""

from .config import ExperimentConfig
from .records import RunRecord, read_records, write_records
from .runner import run_cell, run_experiment, stable_seed
from .slopes import SlopeFit, fit_slope

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "read_records",
    "write_records",
    "run_cell",
    "run_experiment",
    "stable_seed",
    "SlopeFit",
    "fit_slope",
]
