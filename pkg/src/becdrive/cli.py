"""Command-line entry points and deterministic data emission.

Subcommands: vtrace, stability, spectrum, resonance, mc-validate.  All
numeric output is written in the dimensionless unit system with full
round-trip float precision; reruns with identical config and seed are
byte-identical (no timestamps, no thread dependence).

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, classical, quantum
from .config import (
    load_config,
    params_from_config,
    resolved_metadata,
    scenario_from_config,
    schedule_from_config,
)
from .core import UNIT_CONVENTIONS, bogoliubov_uv, dispersion
from .errors import ConfigError, IntegrationFailureError, UnsupportedRegimeError
from .evolution import full_drive, resonance_estimate
from .experiments import (
    RECORD_FIELDS,
    Scenario,
    extrapolate_v_to_zero_k,
    resolve_target_modes,
    run_v_trace,
    spectrum_sweep,
    stability_chart,
)
from .schedule import sinusoid, square_wave

MC_Z_LIMIT = 4.0


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_records_csv(path: Path, records) -> None:
    lines = [",".join(RECORD_FIELDS)]
    for rec in records:
        lines.append(",".join(_fmt(v) for v in rec.as_row()))
    path.write_text("\n".join(lines) + "\n")


def _write_records_json(path: Path, records) -> None:
    rows = [dict(zip(RECORD_FIELDS, rec.as_row())) for rec in records]
    path.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")


def _write_matrix_csv(path: Path, k_values, a_values, matrix) -> None:
    # header row carries the amplitude values, first column the wavenumbers
    lines = [",".join(["k"] + [_fmt(a) for a in a_values])]
    for i, k in enumerate(k_values):
        lines.append(",".join([_fmt(k)] + [_fmt(x) for x in matrix[i]]))
    path.write_text("\n".join(lines) + "\n")


def _write_metadata(path: Path, cfg: dict, command: str, outputs, extra=None) -> None:
    meta = {
        "tool_version": f"becdrive-{__version__}",
        "command": command,
        "config": resolved_metadata(cfg),
        "unit_conventions": UNIT_CONVENTIONS,
        # names only: the sidecar stays byte-identical wherever the run lands
        "outputs": [Path(p).name for p in outputs],
    }
    if extra:
        meta.update(extra)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _prepare(args):
    cfg = load_config(args.config)
    if args.tol is not None:
        cfg["integrator"]["tol"] = args.tol
    if args.seed is not None:
        cfg["monte_carlo"]["seed"] = args.seed
    out_dir = Path(args.out) if args.out else Path(cfg["output"]["path"])
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, out_dir


def cmd_vtrace(args) -> int:
    cfg, out_dir = _prepare(args)
    sc = scenario_from_config(cfg)
    records = run_v_trace(sc)
    suffix = "csv" if cfg["output"]["format"] == "csv" else "json"
    writer = _write_records_csv if suffix == "csv" else _write_records_json
    outputs = []
    for temperature in sc.temperatures:
        sub = [r for r in records if r.T == temperature]
        path = out_dir / f"vtrace_T{temperature:g}mu.{suffix}"
        writer(path, sub)
        outputs.append(path)
    meta = out_dir / "vtrace_meta.json"
    _write_metadata(meta, cfg, "vtrace", outputs,
                    extra={"target_modes": resolve_target_modes(sc)})
    return 0


def cmd_spectrum(args) -> int:
    cfg, out_dir = _prepare(args)
    sc = scenario_from_config(cfg)
    t_eval = cfg["times"]["t_eval"]
    records = spectrum_sweep(sc, t_eval)
    path = out_dir / "spectrum.csv"
    _write_records_csv(path, records)
    extrapolated = {}
    for temperature in sc.temperatures:
        sub = [r for r in records if r.T == temperature]
        if len(sub) >= 3:
            extrapolated[f"{temperature:g}"] = extrapolate_v_to_zero_k(
                [r.k for r in sub], [r.V for r in sub]
            )
    _write_metadata(out_dir / "spectrum_meta.json", cfg, "spectrum", [path],
                    extra={"t_eval": t_eval, "V_extrapolated_k0": extrapolated})
    return 0


def cmd_stability(args) -> int:
    cfg, out_dir = _prepare(args)
    params = params_from_config(cfg)
    sched = schedule_from_config(cfg)
    if sched.drive_period() is None:
        raise ConfigError("stability charts need a periodic schedule kind")
    stab_cfg = cfg["stability"]
    amps = np.linspace(stab_cfg["a_min"], stab_cfg["a_max"], stab_cfg["n_a"])
    maker = sinusoid if sched.kind == "sinusoid" else square_wave

    def family(amplitude):
        return maker(sched.u0, amplitude, sched.omega_D, sched.n_periods)

    chart = stability_chart(
        params, family, params.mode_grid, amps,
        tol=cfg["integrator"]["tol"], refine_boundaries=bool(stab_cfg["refine"]),
    )
    flag_path = out_dir / "stability_flags.csv"
    growth_path = out_dir / "stability_growth.csv"
    _write_matrix_csv(flag_path, chart.k_values, chart.amplitudes, chart.unstable.astype(int))
    _write_matrix_csv(growth_path, chart.k_values, chart.amplitudes, chart.growth)
    _write_metadata(
        out_dir / "stability_meta.json", cfg, "stability", [flag_path, growth_path],
        extra={"tongue_boundaries": [list(b) for b in chart.boundaries]},
    )
    return 0


def cmd_resonance(args) -> int:
    cfg, out_dir = _prepare(args)
    params = params_from_config(cfg)
    sched = schedule_from_config(cfg)
    result = {}
    for branch in ("small", "large"):
        k = resonance_estimate(sched, params, branch=branch)
        entry = {"k": k}
        if k is not None:
            entry["omega_k"] = dispersion(k, sched.u0, params)
            if branch == "small":
                entry["residual"] = dispersion(k, sched.u0, params) - sched.omega_D / 2.0
            else:
                amp = abs(sched.amplitude_A)
                u_hi = sched.u0 * (1.0 + math.pi * amp / 3.0)
                u_lo = sched.u0 * (1.0 - math.pi * amp / 3.0)
                entry["residual"] = (
                    dispersion(k, u_hi, params) + dispersion(k, u_lo, params) - sched.omega_D
                )
        result[f"{branch}_amplitude_branch"] = entry
    selected = resonance_estimate(sched, params)
    result["selected_k"] = selected
    path = out_dir / "resonance.json"
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    for branch in ("small", "large"):
        print(f"{branch}-amplitude estimate: k = {result[f'{branch}_amplitude_branch']['k']!r}")
    print(f"selected: k = {selected!r}")
    _write_metadata(out_dir / "resonance_meta.json", cfg, "resonance", [path])
    return 0


def cmd_mc_validate(args) -> int:
    cfg, out_dir = _prepare(args)
    sc = scenario_from_config(cfg)
    mc_cfg = cfg["monte_carlo"]
    k = resolve_target_modes(sc)[0]
    temperature = sc.temperatures[0]
    t_eval = cfg["times"]["t_eval"]
    est = classical.monte_carlo_ensemble(
        sc.schedule, k, temperature, sc.params,
        sample_count=mc_cfg["samples"], seed=mc_cfg["seed"], t=t_eval, tol=sc.tol,
    )

    u_out_val = sc.schedule.interaction_at(0.0)
    u, v = bogoliubov_uv(k, u_out_val, sc.params)
    omega_out = dispersion(k, u_out_val, sc.params)
    omega_in = dispersion(k, sc.schedule.interaction_at(sc.schedule.t_in), sc.params)
    n_cl_th = temperature / omega_in
    coeffs = full_drive(sc.schedule, k, sc.tol).coefficients
    lam, gam = quantum.total_coefficients(coeffs, u, v, omega_out, t_eval)
    g_sq = abs(complex(gam)) ** 2
    n_cl = classical.classical_occupation(n_cl_th, g_sq)
    m_cl = complex(classical.classical_anomalous(n_cl_th, complex(gam) * complex(lam).conjugate()))

    checks = [
        ("mean_intensity", est.mean_intensity, n_cl, est.se_mean_intensity),
        ("intensity_auto", est.intensity_auto, 2.0 * n_cl**2, est.se_intensity_auto),
        ("intensity_cross", est.intensity_cross, n_cl**2 + abs(m_cl) ** 2, est.se_intensity_cross),
        ("anomalous_re", est.anomalous.real, m_cl.real, est.se_anomalous_re),
        ("anomalous_im", est.anomalous.imag, m_cl.imag, est.se_anomalous_im),
        ("v_cl", est.v_cl, classical.classical_tmv(n_cl_th, g_sq), est.se_v_cl),
    ]
    lines = ["statistic,estimate,closed_form,se,z"]
    worst = 0.0
    for name, value, target, se in checks:
        z = (value - target) / se if se > 0 else math.inf
        worst = max(worst, abs(z))
        lines.append(f"{name},{_fmt(value)},{_fmt(target)},{_fmt(se)},{_fmt(z)}")
        print(f"{name}: z = {z:+.3f}")
    path = out_dir / "mc_validate.csv"
    path.write_text("\n".join(lines) + "\n")
    _write_metadata(out_dir / "mc_validate_meta.json", cfg, "mc-validate", [path],
                    extra={"k": k, "temperature": temperature, "z_limit": MC_Z_LIMIT})
    if worst > MC_Z_LIMIT:
        print(f"worst |z| = {worst:.3f} exceeds {MC_Z_LIMIT}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="becdrive",
        description="Driven BEC excitations: quantum vs classical observables",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "vtrace": cmd_vtrace,
        "stability": cmd_stability,
        "spectrum": cmd_spectrum,
        "resonance": cmd_resonance,
        "mc-validate": cmd_mc_validate,
    }
    for name, func in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario configuration file (YAML)")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--tol", type=float, default=None, help="integrator tolerance override")
        p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed override")
        p.add_argument("--threads", type=int, default=1,
                       help="worker count hint; results never depend on it")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationFailureError, UnsupportedRegimeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
