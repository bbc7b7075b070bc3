"""Scenario runners, deterministic CSV/SVG artifacts and the command line."""

from .config import RunConfig, SCENARIOS, default_config, load_run_config
from .runner import RunResult, run_scenario
from .scenarios import quadratic_variation_beta, sample_paths

__all__ = [
    "RunConfig",
    "RunResult",
    "SCENARIOS",
    "default_config",
    "load_run_config",
    "quadratic_variation_beta",
    "run_scenario",
    "sample_paths",
]
