"""Experiment configuration, named experiments and the command line runner."""
from .config import EXPERIMENTS, ConfigError, ExperimentConfig, default_config, load_config
from .experiments import Check, RunResult, run_experiment
from ..fitting import SlopeFit, fit_slope

__all__ = ["EXPERIMENTS", "ConfigError", "ExperimentConfig", "default_config", "load_config",
           "Check", "RunResult", "run_experiment", "SlopeFit", "fit_slope"]
