"""Offline charts for querygames CSV outputs."""

from .compare import plot_strategy_comparison
from .exponent import plot_exponent
from .rows import RowError, SimulateRow, SweepRow, read_simulate_rows, read_sweep_rows

__all__ = [
    "RowError",
    "SimulateRow",
    "SweepRow",
    "plot_exponent",
    "plot_strategy_comparison",
    "read_simulate_rows",
    "read_sweep_rows",
]
