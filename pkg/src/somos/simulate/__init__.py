"""Monte Carlo side: exact geometric digit sampling, trajectory
statistics, random-orbit experiments, and goodness-of-fit tests."""

from .sampling import (
    DigitStream,
    DigitTables,
    quantize_log,
    resolve_digit_exact,
    sample_digit,
    sample_digit_batch,
    tables_for,
)
from .stats import ChiSquareResult, chi_square_gof, two_sample_chi_square
from .trajectory import (
    EnsembleSummary,
    TrajectoryStats,
    lebesgue_orbit_experiment,
    run_ensemble,
    run_trajectory,
)

__all__ = [
    "DigitStream",
    "DigitTables",
    "quantize_log",
    "resolve_digit_exact",
    "sample_digit",
    "sample_digit_batch",
    "tables_for",
    "ChiSquareResult",
    "chi_square_gof",
    "two_sample_chi_square",
    "EnsembleSummary",
    "TrajectoryStats",
    "lebesgue_orbit_experiment",
    "run_ensemble",
    "run_trajectory",
]
