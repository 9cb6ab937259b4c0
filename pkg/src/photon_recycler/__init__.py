"""Tunable-coupling cavity photon capture: simulation, control, closed forms."""

from .analytic import (AnalyticReport, ExpMetrics, ImprovementFactor,
                       InfeasibleProtocolError, NoisyMetrics, SinglePassOptimum,
                       SquareMetrics, build_report, capped_exit_time_exp,
                       exp_metrics, exp_reflection, improvement_factor,
                       noisy_metrics, select_delay_exp, single_pass_optimum,
                       solve_k, square_metrics)
from .control import (ProtocolParams, SquareDelayResult, exp_protocol,
                      select_delay_square, stop_times)
from .core import (LedgerSummary, SimConfig, Trajectory, energy_ledger,
                   output_amplitude, simulate_single_pass, simulate_two_pass)
from .policies import CouplingPolicy, greedy_coupling
from .pulses import PulseSpec
from .sweep import BoundaryCurve, GridSpec, LossGrid, boundary_extract, loss_grid

__version__ = "0.1.0"

__all__ = [
    "AnalyticReport", "BoundaryCurve", "CouplingPolicy", "ExpMetrics",
    "GridSpec", "ImprovementFactor", "InfeasibleProtocolError", "LedgerSummary",
    "LossGrid", "NoisyMetrics", "ProtocolParams", "PulseSpec", "SimConfig",
    "SinglePassOptimum", "SquareDelayResult", "SquareMetrics", "Trajectory",
    "boundary_extract", "build_report", "capped_exit_time_exp", "energy_ledger",
    "exp_metrics", "exp_protocol", "exp_reflection", "greedy_coupling",
    "improvement_factor", "loss_grid", "noisy_metrics", "output_amplitude",
    "select_delay_exp", "select_delay_square", "simulate_single_pass",
    "simulate_two_pass", "single_pass_optimum", "solve_k", "square_metrics",
    "stop_times",
]
