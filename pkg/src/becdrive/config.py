"""Strict scenario configuration: YAML in, validated Scenario out.

The file is a plain key-value tree (YAML; JSON is a subset and works
too).  Unknown keys are rejected at every level so a misspelled physics
parameter can never be silently ignored, and ``schema_version`` must
match exactly.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import yaml

from . import schedule as schedules
from .core import SystemParams
from .errors import ConfigError
from .experiments import Scenario

SCHEMA_VERSION = 1

_DEFAULTS = {
    "system": {"box_mode": "3d-shells"},
    "temperatures_over_mu": [1.0],
    "modes": {"target": "auto_resonant"},
    "times": {"t_max": 20.0, "n_samples": 256, "include_t_m": True, "t_eval": 0.0},
    "integrator": {"tol": 1e-12},
    "monte_carlo": {"samples": 100000, "seed": 20260809},
    "stability": {"a_min": 0.0, "a_max": 0.3, "n_a": 7, "refine": True},
    "output": {"format": "csv", "path": "out"},
}

_ALLOWED = {
    "": {"schema_version", "system", "schedule", "temperatures_over_mu", "modes",
         "times", "integrator", "monte_carlo", "stability", "output"},
    "system": {"density_n", "atom_number_N", "u0", "box_mode"},
    "schedule": {"kind", "amplitude_A", "omega_D", "n_periods", "segments", "samples"},
    "schedule.samples": {"dt", "values"},
    "modes": {"grid", "k_list", "target"},
    "modes.grid": {"k_min", "k_max", "n"},
    "times": {"t_max", "n_samples", "include_t_m", "t_eval"},
    "integrator": {"tol"},
    "monte_carlo": {"samples", "seed"},
    "stability": {"a_min", "a_max", "n_a", "refine"},
    "output": {"format", "path"},
}


def _check_keys(tree: dict, path: str = ""):
    allowed = _ALLOWED.get(path)
    if allowed is None:
        return
    if not isinstance(tree, dict):
        raise ConfigError(f"section {path or '<root>'!r} must be a mapping")
    unknown = set(tree) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in section {path or '<root>'!r}"
        )
    for key, value in tree.items():
        if isinstance(value, dict):
            _check_keys(value, f"{path}.{key}".lstrip("."))


def _as_float(value, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    value = float(value)
    if positive and value <= 0:
        raise ConfigError(f"{where} must be positive, got {value!r}")
    return value


def _as_int(value, where: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where} must be >= {minimum}, got {value!r}")
    return value


def load_config(path) -> dict:
    """Read, schema-check and default-fill a scenario configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    _check_keys(raw)
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version {version!r} does not match supported {SCHEMA_VERSION}"
        )
    for section in ("system", "schedule", "modes"):
        if section not in raw:
            raise ConfigError(f"required section {section!r} is missing")

    cfg = {"schema_version": SCHEMA_VERSION}
    for key, defaults in _DEFAULTS.items():
        if isinstance(defaults, dict):
            merged = dict(defaults)
            merged.update(raw.get(key, {}))
            cfg[key] = merged
        else:
            cfg[key] = raw.get(key, defaults)
    cfg["schedule"] = dict(raw["schedule"])
    return cfg


def params_from_config(cfg: dict) -> SystemParams:
    sys_cfg = cfg["system"]
    for key in ("density_n", "atom_number_N", "u0"):
        if key not in sys_cfg:
            raise ConfigError(f"system.{key} is required")
    if sys_cfg["box_mode"] not in ("1d", "3d-shells"):
        raise ConfigError(f"system.box_mode must be '1d' or '3d-shells'")
    mode_cfg = cfg["modes"]
    if ("grid" in mode_cfg) == ("k_list" in mode_cfg):
        raise ConfigError("modes needs exactly one of 'grid' or 'k_list'")
    if "grid" in mode_cfg:
        grid_cfg = mode_cfg["grid"]
        for key in ("k_min", "k_max", "n"):
            if key not in grid_cfg:
                raise ConfigError(f"modes.grid.{key} is required")
        k_min = _as_float(grid_cfg["k_min"], "modes.grid.k_min", positive=True)
        k_max = _as_float(grid_cfg["k_max"], "modes.grid.k_max", positive=True)
        n = _as_int(grid_cfg["n"], "modes.grid.n", minimum=2)
        if k_max <= k_min:
            raise ConfigError("modes.grid.k_max must exceed k_min")
        grid = np.linspace(k_min, k_max, n)
    else:
        grid = [_as_float(k, "modes.k_list entry", positive=True) for k in mode_cfg["k_list"]]
    temps = cfg["temperatures_over_mu"]
    if not isinstance(temps, list) or not temps:
        raise ConfigError("temperatures_over_mu must be a nonempty list")
    try:
        return SystemParams(
            density_n=_as_float(sys_cfg["density_n"], "system.density_n", positive=True),
            atom_number_N=_as_int(sys_cfg["atom_number_N"], "system.atom_number_N", minimum=1),
            u0=_as_float(sys_cfg["u0"], "system.u0", positive=True),
            temperature_T=_as_float(temps[0], "temperatures_over_mu[0]", positive=True),
            mode_grid=tuple(float(k) for k in grid),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def schedule_from_config(cfg: dict):
    sched_cfg = cfg["schedule"]
    kind = sched_cfg.get("kind")
    u0 = _as_float(cfg["system"]["u0"], "system.u0", positive=True)
    try:
        if kind == "constant":
            return schedules.constant(u0)
        if kind in ("sinusoid", "square_wave"):
            for key in ("amplitude_A", "omega_D", "n_periods"):
                if key not in sched_cfg:
                    raise ConfigError(f"schedule.{key} is required for kind {kind!r}")
            maker = schedules.sinusoid if kind == "sinusoid" else schedules.square_wave
            return maker(
                u0,
                _as_float(sched_cfg["amplitude_A"], "schedule.amplitude_A"),
                _as_float(sched_cfg["omega_D"], "schedule.omega_D", positive=True),
                _as_int(sched_cfg["n_periods"], "schedule.n_periods", minimum=1),
            )
        if kind == "piecewise_constant":
            segments = sched_cfg.get("segments")
            if not isinstance(segments, list) or not segments:
                raise ConfigError("schedule.segments must be a nonempty list of [duration, U]")
            return schedules.piecewise_constant(u0, [tuple(seg) for seg in segments])
        if kind == "sampled":
            samples = sched_cfg.get("samples")
            if not isinstance(samples, dict) or "dt" not in samples or "values" not in samples:
                raise ConfigError("schedule.samples must provide dt and values")
            return schedules.sampled(
                u0, samples["values"], _as_float(samples["dt"], "schedule.samples.dt", positive=True)
            )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid schedule: {exc}") from exc
    raise ConfigError(f"unknown schedule kind {kind!r}")


def scenario_from_config(cfg: dict) -> Scenario:
    """Build the runnable Scenario, re-raising any physics-level complaint."""
    params = params_from_config(cfg)
    sched = schedule_from_config(cfg)
    mode_cfg = cfg["modes"]
    target = mode_cfg.get("target", "auto_resonant")
    if target != "auto_resonant":
        if not isinstance(target, list) or not target:
            raise ConfigError("modes.target must be 'auto_resonant' or a list of wavenumbers")
        target = tuple(_as_float(k, "modes.target entry", positive=True) for k in target)
    times = cfg["times"]
    temps = tuple(
        _as_float(T, "temperatures_over_mu entry", positive=True)
        for T in cfg["temperatures_over_mu"]
    )
    try:
        return Scenario(
            params=params,
            schedule=sched,
            temperatures=temps,
            t_max=_as_float(times["t_max"], "times.t_max", positive=True),
            n_samples=_as_int(times["n_samples"], "times.n_samples", minimum=2),
            include_t_m=bool(times["include_t_m"]),
            target_modes=target,
            box_mode=cfg["system"]["box_mode"],
            tol=_as_float(cfg["integrator"]["tol"], "integrator.tol", positive=True),
            seed=_as_int(cfg["monte_carlo"]["seed"], "monte_carlo.seed"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolved_metadata(cfg: dict) -> dict:
    """The fully resolved configuration tree for the metadata sidecar."""
    out = {}
    for key, value in cfg.items():
        out[key] = dict(value) if isinstance(value, dict) else value
    params = params_from_config(cfg)
    sched = schedule_from_config(cfg)
    out["resolved"] = {
        "mu_baseline": params.u0 * params.density_n,
        "mu_out_region": sched.interaction_at(0.0) * params.density_n,
        "box_volume": params.box_volume,
        "t_in": sched.t_in if math.isfinite(sched.t_in) else None,
        "square_wave_phase": "starts on the low segment; integer periods end low",
    }
    return out
