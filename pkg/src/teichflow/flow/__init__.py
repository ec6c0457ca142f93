"""Coupled map/metric flows, the limit flow and their sweeps."""
from .core import (CSV_COLUMNS, CFLViolation, DegenerationAlarm, DiagnosticsRow, FlowAbort,
                   FlowParams, FlowState, Trajectory, advance, cfl_dt, energy_identity_residual,
                   evaluate, metric_step, run, step)
from .init import perturbed_metric, standard_initial_data
from .limit import edge_strain, metric_velocity_error, run_limit_flow
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .sweeps import (ConcentrationAlarm, EtaSweepReport, KappaSweepReport, TensionGrowthReport,
                     concentration_growing, eta_sweep, kappa_sweep, loglog_slope,
                     tension_growth_check)

__all__ = [
    "CSV_COLUMNS", "CFLViolation", "DegenerationAlarm", "DiagnosticsRow", "FlowAbort",
    "FlowParams", "FlowState", "Trajectory", "advance", "cfl_dt", "energy_identity_residual",
    "evaluate", "metric_step", "run", "step", "perturbed_metric", "standard_initial_data",
    "edge_strain", "metric_velocity_error", "run_limit_flow", "SnapshotError", "load_snapshot",
    "save_snapshot", "ConcentrationAlarm", "EtaSweepReport", "KappaSweepReport",
    "TensionGrowthReport", "concentration_growing", "eta_sweep", "kappa_sweep", "loglog_slope",
    "tension_growth_check",
]
