"""TD-DBP receiver datapath, float and fixed point."""

from .complexity import estimate_crossover
from .engine import (
    build_config,
    calibrate_formats,
    dbp_run,
    edge_symbols,
    fir_apply,
    span_gamma,
    stage_names,
    trim_edges,
)
from .nonlinear import nonlinear_exact, nonlinear_taylor
from .receiver import evaluate, evaluate_ideal, receive, receive_ideal

__all__ = [
    "estimate_crossover",
    "build_config",
    "calibrate_formats",
    "dbp_run",
    "edge_symbols",
    "fir_apply",
    "span_gamma",
    "stage_names",
    "trim_edges",
    "nonlinear_exact",
    "nonlinear_taylor",
    "evaluate",
    "evaluate_ideal",
    "receive",
    "receive_ideal",
]
