"""Finite-truncation laboratory for the oscillatory Hilbert A-module and the twisted de Rham complex."""

from .experiments import ExperimentConfig, Report, list_experiments, run

__all__ = ["ExperimentConfig", "Report", "list_experiments", "run"]
__version__ = "0.1.0"
