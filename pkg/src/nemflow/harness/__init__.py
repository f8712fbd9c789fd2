"""Configuration, persistence, fitting, plotting and run orchestration."""

from .checkpoint import read_checkpoint, write_checkpoint
from .config import RunConfig, config_hash, format_config, parse_config
from .fitting import DecayFit, fit_decay
from .plotting import PlotSeries, PlotStyle, emit_plot
from .runner import RunSummary, box_convergence_study, run_campaign, run_simulation, selftest

__all__ = [
    "RunConfig", "parse_config", "format_config", "config_hash", "read_checkpoint",
    "write_checkpoint", "DecayFit", "fit_decay", "PlotSeries", "PlotStyle", "emit_plot",
    "RunSummary", "run_simulation", "run_campaign", "box_convergence_study", "selftest",
]
