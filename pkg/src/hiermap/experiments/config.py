"""Run configuration: scenario registry, profile defaults, TOML loading.

A run is configured in three layers, later ones winning: built-in defaults
for the (scenario, profile) pair, then the TOML file sections ``prior``,
``forward``, ``noise``, ``objective``, ``optimizer``, ``scenario``, then
command-line overrides.  Everything is validated here so the CLI can map
any complaint to exit code 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from ..errors import ConfigError

SCENARIOS = (
    "sample-paths",
    "truncation-study",
    "rate-trace",
    "landscape-2d",
    "noise-decay",
    "obs-in-gamma-decay",
    "quadratic-variation",
    "gibbs-acceptance",
)

PROFILES = ("ci", "full")

METHOD_NAMES = ("C", "NC", "E", "C_full", "EM")

_SECTION_KEYS = {
    "prior": {"family", "fixed", "free", "lower", "upper", "boundary"},
    "forward": {"kind", "exponent", "table"},
    "noise": {"kind", "gamma", "w"},
    "objective": {"methods", "n_max"},
    "optimizer": {"method", "grid_points_per_dim", "tol_theta", "max_evals"},
}

_COMMON_SCENARIO_KEYS = {"name", "n_schedule", "replicates", "seed",
                         "output_dir", "profile"}

_SCENARIO_EXTRAS = {
    "sample-paths": {"grid_size", "n_paths", "kernels"},
    "truncation-study": set(),
    "rate-trace": {"truth_panel", "truth_modes", "truth_grid"},
    "landscape-2d": {"grid_cells", "variants"},
    "noise-decay": {"w_list"},
    "obs-in-gamma-decay": {"w_list", "gamma_schedule"},
    "quadratic-variation": {"pairs", "n_points"},
    "gibbs-acceptance": {"variants", "n_steps", "pcn_beta",
                         "theta_proposal_std", "theta_init"},
}


def canonical_scenario(name: str) -> str:
    """Accept the kebab-case name or the CamelCase spelling of a scenario."""
    squashed = str(name).replace("-", "").replace("_", "").lower()
    for s in SCENARIOS:
        if squashed == s.replace("-", ""):
            return s
    raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one scenario run."""

    scenario: str
    n_schedule: tuple
    replicates: int
    seed: int
    output_dir: str
    profile: str = "ci"
    prior: dict = field(default_factory=dict)
    forward: dict = field(default_factory=dict)
    noise: dict = field(default_factory=dict)
    objective: dict = field(default_factory=dict)
    optimizer: dict = field(default_factory=dict)
    scenario_options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "scenario", canonical_scenario(self.scenario))
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown profile {self.profile!r}")
        try:
            schedule = tuple(int(n) for n in self.n_schedule)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"n_schedule must be a list of integers: {exc}")
        if any(n < 1 for n in schedule):
            raise ConfigError("n_schedule entries must be >= 1")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ConfigError("n_schedule must be strictly increasing")
        object.__setattr__(self, "n_schedule", schedule)
        if int(self.replicates) < 1:
            raise ConfigError("replicates must be >= 1")
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "seed", int(self.seed))
        methods = self.objective.get("methods", [])
        bad = [m for m in methods if m not in METHOD_NAMES]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {METHOD_NAMES}")
        gammas = self.scenario_options.get("gamma_schedule", [])
        if gammas:
            if any(g <= 0 for g in gammas):
                raise ConfigError("gamma_schedule entries must be positive")
            if any(b >= a for a, b in zip(gammas, gammas[1:])):
                raise ConfigError("gamma_schedule must be strictly decreasing")

    def echo(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Defaults


_PRIOR_1D = {
    "family": "whittle_matern",
    "fixed": {"sigma": 1.0, "nu": 1.5},
    "free": ["ell_inv"],
    "lower": [0.05],
    "upper": [20.0],
    "boundary": "neumann1d",
}

_DEBLUR = {"kind": "deblurring"}


def _scenario_defaults(scenario: str, profile: str) -> dict:
    full = profile == "full"
    base = {
        "n_schedule": [],
        "replicates": 1,
        "seed": 0,
        "output_dir": "out",
        "prior": dict(_PRIOR_1D),
        "forward": dict(_DEBLUR),
        "noise": {"kind": "decay_in_n", "w": 5.0},
        "objective": {"methods": ["C", "NC", "E"]},
        "optimizer": {"method": "auto", "grid_points_per_dim": 32,
                      "tol_theta": 1e-6},
        "scenario_options": {},
    }
    if scenario == "rate-trace":
        base["n_schedule"] = ([2 ** k for k in range(15)] if full
                              else [4, 16, 64, 256, 1024, 4096, 16384])
        base["replicates"] = 1000 if full else 100
        base["scenario_options"] = {"truth_panel": True, "truth_modes": 512,
                                    "truth_grid": 1024}
    elif scenario == "truncation-study":
        base["n_schedule"] = [4, 16, 64, 256, 1024]
        base["replicates"] = 1000 if full else 100
        base["objective"] = {"methods": ["C", "C_full"], "n_max": 100_000}
    elif scenario == "noise-decay":
        base["n_schedule"] = [4, 16, 64, 256, 1024, 4096]
        base["replicates"] = 1000 if full else 100
        base["prior"] = dict(_PRIOR_1D, family="whittle_matern_normalized")
        base["noise"] = {"kind": "decay_in_n", "w": 4.0}
        base["objective"] = {"methods": ["C", "E"]}
        base["scenario_options"] = {"w_list": [3.5, 4.0, 4.5]}
    elif scenario == "obs-in-gamma-decay":
        base["replicates"] = 1000 if full else 100
        base["prior"] = dict(_PRIOR_1D, family="whittle_matern_normalized")
        base["noise"] = {"kind": "obs_in_gamma", "w": 4.0}
        base["objective"] = {"methods": ["C", "E"]}
        base["scenario_options"] = {
            "w_list": [3.5, 4.0, 4.5],
            "gamma_schedule": [2.0 ** -m for m in (7, 14, 21, 28, 35, 42)],
        }
    elif scenario == "landscape-2d":
        base["n_schedule"] = [1, 10, 100, 1000]
        base["prior"] = {
            "family": "whittle_matern",
            "fixed": {"nu": 1.5},
            "free": ["sigma", "ell_inv"],
            "lower": [1e-8, 1e-8],
            "upper": [5.0, 5.0],
            "boundary": "neumann1d",
        }
        base["objective"] = {"methods": ["C"]}
        base["scenario_options"] = {"grid_cells": 128,
                                    "variants": ["sigma_ell", "sigma_beta"]}
    elif scenario == "gibbs-acceptance":
        base["n_schedule"] = [10, 100, 1000]
        base["replicates"] = 10 if full else 3
        base["noise"] = {"kind": "fixed", "gamma": 0.1}
        base["objective"] = {"methods": []}
        base["scenario_options"] = {
            "variants": ["centred", "noncentred"],
            "n_steps": 10_000 if full else 2000,
            "pcn_beta": 0.2,
            "theta_proposal_std": 0.25,
        }
    elif scenario == "quadratic-variation":
        base["replicates"] = 1000 if full else 100
        base["objective"] = {"methods": []}
        base["scenario_options"] = {"pairs": [[1.0, 1.0], [2.0, 4.0]],
                                    "n_points": 16_384}
    elif scenario == "sample-paths":
        base["objective"] = {"methods": []}
        base["scenario_options"] = {
            "grid_size": 512,
            "n_paths": 3,
            "kernels": [
                {"kind": "ou", "sigma": 1.0, "ell": 0.25},
                {"kind": "matern", "sigma": 1.0, "ell": 0.25, "nu": 1.5},
                {"kind": "squared_exponential", "sigma": 1.0, "ell": 0.25},
            ],
        }
    return base


def default_config(scenario: str, profile: str = "ci", seed: int = 0,
                   output_dir: str = "out") -> RunConfig:
    scenario = canonical_scenario(scenario)
    data = _scenario_defaults(scenario, profile)
    data.update(seed=seed, output_dir=output_dir)
    return RunConfig(scenario=scenario, profile=profile, **data)


# ---------------------------------------------------------------------------
# TOML loading and merging


def _check_keys(section: str, given: dict, allowed) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in [{section}]")


def _read_toml(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"could not parse {path}: {exc}")


def load_run_config(scenario: str, config_path=None, *, seed=None, out=None,
                    replicates=None, profile=None, grid=None, tol=None,
                    max_evals=None) -> RunConfig:
    """Resolve defaults <- TOML file <- explicit overrides into a RunConfig."""
    scenario = canonical_scenario(scenario)
    file_data = _read_toml(config_path) if config_path is not None else {}
    _check_keys("<top level>", file_data,
                set(_SECTION_KEYS) | {"scenario"})
    scen_section = dict(file_data.get("scenario", {}))
    _check_keys("scenario", scen_section,
                _COMMON_SCENARIO_KEYS | _SCENARIO_EXTRAS[scenario])
    if "name" in scen_section:
        if canonical_scenario(scen_section["name"]) != scenario:
            raise ConfigError(
                f"config file is for scenario {scen_section['name']!r}, "
                f"not {scenario!r}")
        scen_section.pop("name")

    resolved_profile = profile or scen_section.pop("profile", None) or "ci"
    data = _scenario_defaults(scenario, resolved_profile)

    for section in ("prior", "forward", "noise", "objective", "optimizer"):
        given = file_data.get(section)
        if given is None:
            continue
        if not isinstance(given, dict):
            raise ConfigError(f"[{section}] must be a table")
        _check_keys(section, given, _SECTION_KEYS[section])
        data[section] = {**data[section], **given}
    for key in ("n_schedule", "replicates", "seed", "output_dir"):
        if key in scen_section:
            data[key] = scen_section.pop(key)
    data["scenario_options"] = {**data["scenario_options"], **scen_section}

    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["output_dir"] = str(out)
    if replicates is not None:
        data["replicates"] = replicates
    for key, value in (("grid_points_per_dim", grid), ("tol_theta", tol),
                       ("max_evals", max_evals)):
        if value is not None:
            data["optimizer"] = {**data["optimizer"], key: value}
    return RunConfig(scenario=scenario, profile=resolved_profile, **data)
