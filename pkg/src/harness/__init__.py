"""Experiment specs, sweeps and comparison reports."""

from .compare import compare_report
from .runner import ExperimentRunner, ResultSet, run_experiment
from .spec import load_spec, spec_hash, with_seed

__all__ = [
    "compare_report",
    "ExperimentRunner",
    "ResultSet",
    "run_experiment",
    "load_spec",
    "spec_hash",
    "with_seed",
]
