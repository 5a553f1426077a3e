"""Scenario harness: observable traces, spectrum sweeps, stability charts
and quantum/classical convergence studies.

A scenario couples a gas configuration with one drive protocol and is
evaluated in the out-region t >= 0: the drive history enters only
through the per-mode transfer coefficients, which are frozen at
switch-off while the out-region phases keep rotating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from . import classical, quantum
from .core import (
    SystemParams,
    bogoliubov_uv,
    classical_thermal_occupation,
    dispersion,
    shell_weights,
    thermal_occupation,
)
from .errors import ConfigError
from .evolution import (
    BogoCoefficients,
    TransferMatrix,
    full_drive,
    growth_rate,
    is_unstable,
    monodromy,
    resonance_estimate,
)

#: |beta|^2 below which the drive phase delta_k carries no information
#: and optimal-time markers are skipped.
_NEGLIGIBLE_BETA_SQ = 1e-30


@dataclass(frozen=True)
class Scenario:
    """One reproducible experiment: gas + drive + evaluation plan."""

    params: SystemParams
    schedule: object
    temperatures: tuple
    t_max: float = 20.0
    n_samples: int = 256
    include_t_m: bool = True
    target_modes: Union[str, tuple] = "auto_resonant"
    box_mode: str = "3d-shells"
    tol: float = 1e-12
    seed: int = 0
    depletion_warn_fraction: float = 0.1

    def __post_init__(self):
        if not self.temperatures:
            raise ConfigError("at least one temperature is required")
        if any(T <= 0 for T in self.temperatures):
            raise ConfigError("temperatures must be positive multiples of mu0")
        if self.t_max <= 0 or self.n_samples < 2:
            raise ConfigError("need t_max > 0 and n_samples >= 2")
        if not self.params.mode_grid:
            raise ConfigError("the scenario needs a nonempty mode grid")


@dataclass(frozen=True)
class ModeSolution:
    """Drive outcome for one mode: transfer pair plus out/in-region data."""

    k: float
    coeffs: BogoCoefficients
    u_out: float
    v_out: float
    omega_out: float
    omega_in: float
    norm_defect: float
    error_estimate: float

    @property
    def beta_sq(self) -> float:
        return abs(self.coeffs.beta) ** 2


FLAG_FIELDS = ("subpoisson_q", "subpoisson_cl", "intensity_csi", "mode_csi", "nonseparable")

RECORD_FIELDS = (
    "k", "t", "T", "n_th", "n_cl_th", "beta_sq", "gamma_sq", "n_k",
    "m_k_re", "m_k_im", "V", "V_cl", "d5",
    *FLAG_FIELDS,
    "rho_corr_q", "rho_corr_cl", "depletion_fraction", "validity_flags",
)


@dataclass(frozen=True)
class ObservableRecord:
    """One output row pairing quantum and classical observables at (k, t, T)."""

    k: float
    t: float
    T: float
    n_th: float
    n_cl_th: float
    beta_sq: float
    gamma_sq: float
    n_k: float
    m_k_re: float
    m_k_im: float
    V: float
    V_cl: float
    d5: float
    subpoisson_q: int
    subpoisson_cl: int
    intensity_csi: int
    mode_csi: int
    nonseparable: int
    rho_corr_q: float
    rho_corr_cl: float
    depletion_fraction: float
    validity_flags: str

    def as_row(self) -> tuple:
        return tuple(getattr(self, name) for name in RECORD_FIELDS)


def solve_modes(sc: Scenario) -> list:
    """Transfer coefficients and out-region data for every grid mode."""
    u_out_val = sc.schedule.interaction_at(0.0)
    u_in_val = sc.schedule.interaction_at(sc.schedule.t_in)
    out = []
    for k in sc.params.mode_grid:
        transfer = full_drive(sc.schedule, k, sc.tol)
        u, v = bogoliubov_uv(k, u_out_val, sc.params)
        out.append(
            ModeSolution(
                k=k,
                coeffs=transfer.coefficients,
                u_out=u,
                v_out=v,
                omega_out=dispersion(k, u_out_val, sc.params),
                omega_in=dispersion(k, u_in_val, sc.params),
                norm_defect=transfer.norm_defect,
                error_estimate=transfer.error_estimate,
            )
        )
    return out


def resolve_target_modes(sc: Scenario, solutions=None) -> list:
    """Target wavenumbers, snapping auto_resonant / explicit values to the grid."""
    grid = np.asarray(sc.params.mode_grid)
    if sc.target_modes == "auto_resonant":
        k_res = resonance_estimate(sc.schedule, sc.params)
        if k_res is None:
            raise ConfigError("no first resonance found; pick target modes explicitly")
        return [float(grid[np.argmin(np.abs(grid - k_res))])]
    return [float(grid[np.argmin(np.abs(grid - k))]) for k in sc.target_modes]


def _time_grid(sc: Scenario, sol: ModeSolution) -> np.ndarray:
    ts = np.linspace(0.0, sc.t_max, sc.n_samples)
    if not sc.include_t_m or sol.beta_sq < _NEGLIGIBLE_BETA_SQ:
        return ts
    t_m = quantum.optimal_time(sol.coeffs.delta_k, sol.omega_out)
    period = math.pi / sol.omega_out
    markers = np.arange(t_m, sc.t_max + 1e-12, period)
    merged = np.union1d(ts, markers)
    # drop near-duplicates so t_m markers never double existing samples
    keep = np.concatenate([[True], np.diff(merged) > 1e-12])
    return merged[keep]


def _occupation_matrix(solutions, temperature: float, ts: np.ndarray) -> np.ndarray:
    """n_k(t) for every grid mode (rows) on the time grid (columns)."""
    occ = np.empty((len(solutions), ts.size))
    for i, sol in enumerate(solutions):
        n_th = thermal_occupation(sol.omega_in, temperature)
        g_sq = quantum.gamma_sq_closed(
            sol.v_out, abs(sol.coeffs.beta), sol.coeffs.delta_k, sol.omega_out, ts
        )
        occ[i] = quantum.occupation(n_th, g_sq)
    return occ


def _records_for_mode(sc: Scenario, sol: ModeSolution, temperature: float,
                      ts: np.ndarray, delta_frac: np.ndarray,
                      validity: list) -> list:
    n_atoms = sc.params.atom_number_N
    n_th = thermal_occupation(sol.omega_in, temperature)
    n_cl_th = classical_thermal_occupation(sol.omega_in, temperature)

    lam, gam = quantum.total_coefficients(
        sol.coeffs, sol.u_out, sol.v_out, sol.omega_out, ts
    )
    g_sq = np.abs(gam) ** 2
    n_k = quantum.occupation(n_th, g_sq)
    m_k = quantum.anomalous(n_th, lam, gam)
    m_sq = np.abs(m_k) ** 2
    v_q = 1.0 + (n_k * n_k - m_sq) / n_k
    v_cl = classical.classical_tmv(n_cl_th, g_sq)
    d5 = (n_k * n_k - m_sq) * ((n_k + 1.0) ** 2 - m_sq)

    gl = gam * np.conj(lam)
    n_cl = classical.classical_occupation(n_cl_th, g_sq)
    m_cl = classical.classical_anomalous(n_cl_th, gl)
    rho_q = n_atoms * (2.0 * m_k.real + 2.0 * n_k + 1.0)
    rho_cl = n_atoms * (2.0 * m_cl.real + 2.0 * n_cl)

    nonsep = m_sq > n_k * n_k
    records = []
    for j, t in enumerate(ts):
        records.append(
            ObservableRecord(
                k=sol.k,
                t=float(t),
                T=temperature,
                n_th=n_th,
                n_cl_th=n_cl_th,
                beta_sq=sol.beta_sq,
                gamma_sq=float(g_sq[j]),
                n_k=float(n_k[j]),
                m_k_re=float(m_k[j].real),
                m_k_im=float(m_k[j].imag),
                V=float(v_q[j]),
                V_cl=float(v_cl[j]),
                d5=float(d5[j]),
                subpoisson_q=int(v_q[j] < 1.0),
                subpoisson_cl=int(v_cl[j] < 1.0),
                intensity_csi=int(
                    quantum.g22(n_k[j], m_k[j], "opposite_momentum")
                    > quantum.g22(n_k[j], m_k[j], "same_mode")
                ),
                mode_csi=int(nonsep[j]),
                nonseparable=int(nonsep[j]),
                rho_corr_q=float(rho_q[j]),
                rho_corr_cl=float(rho_cl[j]),
                depletion_fraction=float(delta_frac[j]),
                validity_flags=validity[j],
            )
        )
    return records


def _depletion_and_validity(sc: Scenario, solutions, temperature: float,
                            ts: np.ndarray) -> tuple:
    weights = shell_weights(sc.params, sc.box_mode)
    occ = _occupation_matrix(solutions, temperature, ts)
    delta = weights @ occ
    max_n = occ.max(axis=0)
    frac = delta / sc.params.atom_number_N
    validity = []
    for j in range(ts.size):
        flags = quantum.depletion_validity(
            delta[j], sc.params.atom_number_N, max_n[j], sc.depletion_warn_fraction
        )
        tokens = []
        if flags.beyond_bogoliubov:
            tokens.append("depletion")
        if flags.beyond_density_corr:
            tokens.append("density_corr")
        validity.append(";".join(tokens))
    return frac, validity


def run_v_trace(sc: Scenario) -> list:
    """Quantum V and classical V_cl traces for the target modes.

    For each temperature and each out-region sample time one record is
    emitted per target mode; depletion warnings never abort the run,
    they only mark the affected rows.
    """
    solutions = solve_modes(sc)
    by_k = {sol.k: sol for sol in solutions}
    targets = resolve_target_modes(sc)
    records = []
    for temperature in sc.temperatures:
        for k in targets:
            sol = by_k[k]
            ts = _time_grid(sc, sol)
            frac, validity = _depletion_and_validity(sc, solutions, temperature, ts)
            records.extend(_records_for_mode(sc, sol, temperature, ts, frac, validity))
    records.sort(key=lambda r: (r.T, r.k, r.t))
    return records


def spectrum_sweep(sc: Scenario, t: float = 0.0) -> list:
    """Records over the full mode grid at a single out-region time."""
    if t < 0:
        raise ValueError("spectrum time must lie in the out-region t >= 0")
    solutions = solve_modes(sc)
    ts = np.array([t])
    records = []
    for temperature in sc.temperatures:
        frac, validity = _depletion_and_validity(sc, solutions, temperature, ts)
        for sol in solutions:
            records.extend(_records_for_mode(sc, sol, temperature, ts, frac, validity))
    records.sort(key=lambda r: (r.T, r.k, r.t))
    return records


def extrapolate_v_to_zero_k(ks, vs) -> float:
    """k -> 0 limit of V(k) from the three smallest modes.

    Richardson-style: V has an analytic expansion in k^2 near the
    phonon regime, so a quadratic in k^2 through three points is
    evaluated at k = 0.
    """
    ks = np.asarray(ks, dtype=float)
    vs = np.asarray(vs, dtype=float)
    if ks.size < 3:
        raise ValueError("need at least three modes to extrapolate")
    order = np.argsort(ks)[:3]
    x = ks[order] ** 2
    y = vs[order]
    vand = np.vander(x, 3, increasing=True)
    coeff = np.linalg.solve(vand, y)
    return float(coeff[0])


@dataclass(frozen=True)
class StabilityChart:
    """Instability map over a (k, amplitude) grid with tongue boundaries."""

    k_values: np.ndarray
    amplitudes: np.ndarray
    unstable: np.ndarray
    growth: np.ndarray
    re_alpha: np.ndarray
    boundaries: tuple


def _bisect_edge(flag_at, k_stable: float, k_unstable: float, xtol: float) -> float:
    lo, hi = k_stable, k_unstable
    while abs(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        if flag_at(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def stability_chart(params: SystemParams, schedule_family, k_grid, a_grid,
                    tol: float = 1e-10, refine_boundaries: bool = True) -> StabilityChart:
    """Monodromy stability over modes and drive amplitudes.

    ``schedule_family`` maps an amplitude to a periodic schedule.  The
    first-tongue boundaries are located by bisection in k (on the
    instability flag) around the fastest-growing cell of each row.
    """
    ks = np.asarray(k_grid, dtype=float)
    amps = np.asarray(a_grid, dtype=float)
    unstable = np.zeros((ks.size, amps.size), dtype=bool)
    growth = np.zeros((ks.size, amps.size))
    re_alpha = np.zeros((ks.size, amps.size))

    monos = {}
    for j, amp in enumerate(amps):
        sched = schedule_family(amp)
        for i, k in enumerate(ks):
            mono = monodromy(sched, k, tol)
            monos[(i, j)] = mono
            unstable[i, j] = is_unstable(mono)
            growth[i, j] = growth_rate(mono)
            re_alpha[i, j] = mono.alpha.real

    boundaries = []
    if refine_boundaries:
        xtol = 1e-4 * (ks[-1] - ks[0]) / max(ks.size - 1, 1)
        for j, amp in enumerate(amps):
            col = unstable[:, j]
            if not col.any():
                continue
            sched = schedule_family(amp)

            def flag_at(k):
                return is_unstable(monodromy(sched, k, tol))

            centre = int(np.argmax(growth[:, j]))
            lo_i = centre
            while lo_i > 0 and col[lo_i - 1]:
                lo_i -= 1
            hi_i = centre
            while hi_i < ks.size - 1 and col[hi_i + 1]:
                hi_i += 1
            k_lo = (
                _bisect_edge(flag_at, ks[lo_i - 1], ks[lo_i], xtol) if lo_i > 0 else ks[0]
            )
            k_hi = (
                _bisect_edge(flag_at, ks[hi_i + 1], ks[hi_i], xtol)
                if hi_i < ks.size - 1
                else ks[-1]
            )
            boundaries.append((float(amp), float(k_lo), float(k_hi)))

    return StabilityChart(
        k_values=ks, amplitudes=amps, unstable=unstable, growth=growth,
        re_alpha=re_alpha, boundaries=tuple(boundaries),
    )


class ConvergenceRow(NamedTuple):
    temperature: float
    max_abs_gap: float
    max_rel_gap: float
    n_cl_minus_n_th: float
    onset_q: Optional[float]
    onset_cl: Optional[float]


@dataclass(frozen=True)
class ConvergenceResult:
    rows: tuple
    abs_gap_decreasing: bool
    rel_gap_decreasing: bool


def high_t_convergence(sc: Scenario) -> ConvergenceResult:
    """Quantum/classical V gaps across the temperature ladder.

    Needs at least three temperatures spanning a decade.  Also reports
    the per-mode occupation difference (approaching 1/2 from below) and
    the first sampled sub-Poissonian onset time of each theory.
    """
    temps = sorted(sc.temperatures)
    if len(temps) < 3 or temps[-1] / temps[0] < 10.0:
        raise ConfigError("convergence study needs >= 3 temperatures spanning a decade")
    records = run_v_trace(sc)
    rows = []
    for temperature in temps:
        sub = [r for r in records if r.T == temperature]
        gaps = np.array([abs(r.V - r.V_cl) for r in sub])
        rels = np.array([abs(r.V - r.V_cl) / r.V for r in sub])
        onset_q = next((r.t for r in sub if r.V < 1.0), None)
        onset_cl = next((r.t for r in sub if r.V_cl < 1.0), None)
        rows.append(
            ConvergenceRow(
                temperature=temperature,
                max_abs_gap=float(gaps.max()),
                max_rel_gap=float(rels.max()),
                n_cl_minus_n_th=sub[0].n_cl_th - sub[0].n_th,
                onset_q=onset_q,
                onset_cl=onset_cl,
            )
        )
    abs_gaps = [row.max_abs_gap for row in rows]
    rel_gaps = [row.max_rel_gap for row in rows]
    return ConvergenceResult(
        rows=tuple(rows),
        abs_gap_decreasing=all(b < a for a, b in zip(abs_gaps, abs_gaps[1:])),
        rel_gap_decreasing=all(b < a for a, b in zip(rel_gaps, rel_gaps[1:])),
    )


def dominant_angular_frequency(ts: np.ndarray, values: np.ndarray) -> float:
    """Angular frequency of the strongest nonzero line in a uniform trace."""
    ts = np.asarray(ts, dtype=float)
    steps = np.diff(ts)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ValueError("spectral estimate needs a uniform time grid")
    amps = np.abs(np.fft.rfft(np.asarray(values, dtype=float) - np.mean(values)))
    freqs = np.fft.rfftfreq(ts.size, d=steps[0])
    peak = 1 + int(np.argmax(amps[1:]))
    return 2.0 * math.pi * float(freqs[peak])
