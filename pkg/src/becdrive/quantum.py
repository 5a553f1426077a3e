"""Quantum observables of a driven mode pair at finite initial temperature.

Everything is a closed-form function of the transfer pair (alpha, beta),
the out-region transformation (u, v, omega) and the initial thermal
quasiparticle occupation n_th evaluated at the in-region frequency.
States are Gaussian two-mode squeezed thermal states throughout, so all
higher moments reduce to (n_k, m_k).

Functions accept scalars or numpy arrays (broadcasting elementwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .evolution import BogoCoefficients

#: Slack absorbing integrator round-off in the physicality bound |m|^2 <= n(n+1).
PHYSICALITY_TOL = 1e-9


def total_coefficients(coeffs: BogoCoefficients, u_out: float, v_out: float,
                       omega_out: float, t):
    """Total transformation (lambda, gamma) at out-region time t >= 0.

    lambda = u alpha e^{i w t} + v beta e^{-i w t},
    gamma  = u beta e^{-i w t} + v alpha e^{i w t};
    |lambda|^2 - |gamma|^2 = 1 is inherited from the group structure.
    """
    plus = np.exp(1j * omega_out * np.asarray(t, dtype=float))
    minus = np.conj(plus)
    lam = u_out * coeffs.alpha * plus + v_out * coeffs.beta * minus
    gam = u_out * coeffs.beta * minus + v_out * coeffs.alpha * plus
    return lam, gam


def gamma_sq_closed(v_out: float, beta_mag: float, delta_k: float,
                    omega_out: float, t):
    """|gamma(t)|^2 = v^2 + |b|^2 + 2 v^2 |b|^2 (1 - kappa cos(2 w t + delta)).

    kappa = sqrt((1 + v^-2)(1 + |b|^-2)); the degenerate limits v = 0 or
    beta = 0 reduce to the time-independent v^2 + |b|^2.
    """
    v_sq = v_out * v_out
    b_sq = beta_mag * beta_mag
    if v_sq == 0.0 or b_sq == 0.0:
        return v_sq + b_sq + 0.0 * np.asarray(t, dtype=float)
    kappa = math.sqrt((1.0 + 1.0 / v_sq) * (1.0 + 1.0 / b_sq))
    phase = 2.0 * omega_out * np.asarray(t, dtype=float) + delta_k
    return v_sq + b_sq + 2.0 * v_sq * b_sq * (1.0 - kappa * np.cos(phase))


def occupation(n_th, gamma_sq):
    """Particle occupation n_k = n_th + |gamma|^2 + 2 n_th |gamma|^2."""
    return n_th + gamma_sq + 2.0 * n_th * gamma_sq


def anomalous(n_th, lam, gam):
    """Anomalous correlator m_k = gamma lambda* (1 + 2 n_th)."""
    return gam * np.conj(lam) * (1.0 + 2.0 * n_th)


def anomalous_sq(n_th, gamma_sq):
    """|m_k|^2 = |gamma|^2 (1 + |gamma|^2) (1 + 2 n_th)^2 in closed form."""
    return gamma_sq * (1.0 + gamma_sq) * (1.0 + 2.0 * n_th) ** 2


def g22(n_k, m_k, relation: str):
    """Normally ordered fourth-order correlator G^(2,2).

    ``same_mode``: 2 n^2; ``opposite_momentum``: n^2 + |m|^2;
    ``independent``: n^2.
    """
    n_sq = np.asarray(n_k, dtype=float) ** 2
    if relation == "same_mode":
        return 2.0 * n_sq
    if relation == "opposite_momentum":
        return n_sq + np.abs(m_k) ** 2
    if relation == "independent":
        return n_sq
    raise ValueError(f"unknown mode relation {relation!r}")


def two_mode_variance(n_k, m_k):
    """Normalized number-difference variance V = 1 + (n^2 - |m|^2)/n.

    Sub-Poissonian (V < 1) exactly when |m|^2 > n^2.  Undefined for the
    vacuum n = 0.
    """
    n_k = np.asarray(n_k, dtype=float)
    if np.any(n_k <= 0.0):
        raise ValueError("two-mode variance is undefined for empty modes (n_k = 0)")
    return 1.0 + (n_k * n_k - np.abs(m_k) ** 2) / n_k


def two_mode_variance_alt(n_th, gamma_sq):
    """V on the squeezed thermal family: n_th(1+n_th) / (n_th(1+2g) + g)."""
    n_th = np.asarray(n_th, dtype=float)
    denom = n_th * (1.0 + 2.0 * gamma_sq) + gamma_sq
    if np.any(denom <= 0.0):
        raise ValueError("two-mode variance is undefined for the vacuum (n_th = gamma = 0)")
    return n_th * (1.0 + n_th) / denom


def half_temperature_occupation(n_th):
    """n_th(omega, T/2) expressed through n_th(omega, T): n^2 / (2n + 1).

    This is the sub-Poissonian / nonseparability threshold on |gamma|^2.
    """
    return np.asarray(n_th, dtype=float) ** 2 / (2.0 * np.asarray(n_th, dtype=float) + 1.0)


class NonseparabilityResult(NamedTuple):
    flag: bool
    d5: float


def nonseparability(n_k: float, m_k) -> NonseparabilityResult:
    """Moment-determinant entanglement witness for the mode pair.

    d5 = (n^2 - |m|^2)((n+1)^2 - |m|^2) factorizes with the second
    factor strictly positive on physical states, so the state is
    nonseparable iff d5 < 0 iff |m|^2 > n^2.
    """
    m_sq = abs(m_k) ** 2
    bound = n_k * (n_k + 1.0)
    if m_sq > bound * (1.0 + PHYSICALITY_TOL) + PHYSICALITY_TOL:
        raise ValueError(
            f"|m|^2 = {m_sq!r} exceeds the physical bound n(n+1) = {bound!r}"
        )
    d5 = (n_k * n_k - m_sq) * ((n_k + 1.0) ** 2 - m_sq)
    return NonseparabilityResult(flag=bool(d5 < 0.0), d5=float(d5))


def depletion(states, weights=None) -> float:
    """Total excited population, optionally weighted by shell degeneracy."""
    occ = np.array([st.n_k for st in states], dtype=float)
    if weights is None:
        return float(occ.sum())
    w = np.asarray(weights, dtype=float)
    if w.shape != occ.shape:
        raise ValueError("one weight per mode state is required")
    return float(w @ occ)


def time_averaged_occupation(n_th, v_out, beta_sq):
    """Out-period average of n_k(t).

    Expands into the seven processes: thermal depletion, interaction
    depletion, quasiparticle production, their three pair products and
    the triple product.
    """
    v_sq = np.asarray(v_out, dtype=float) ** 2
    return (
        n_th + v_sq + beta_sq
        + 2.0 * (n_th * v_sq + n_th * beta_sq + v_sq * beta_sq)
        + 4.0 * n_th * v_sq * beta_sq
    )


class ValidityFlags(NamedTuple):
    beyond_bogoliubov: bool
    beyond_density_corr: bool


def depletion_validity(total_depletion: float, atom_number_N: float,
                       max_n_k: float, fraction: float = 0.1) -> ValidityFlags:
    """Monitors for the small-depletion assumptions; thresholds are config knobs.

    ``beyond_bogoliubov`` fires at Delta >= fraction * N, and
    ``beyond_density_corr`` at Delta >= fraction * N / max n_k, the
    stricter bound under which the density-correlator reduction holds.
    """
    beyond_b = total_depletion >= fraction * atom_number_N
    if max_n_k > 0:
        beyond_rho = total_depletion >= fraction * atom_number_N / max_n_k
    else:
        beyond_rho = beyond_b
    return ValidityFlags(bool(beyond_b), bool(beyond_rho))


def gamma_lambda_product(coeffs: BogoCoefficients, u_out: float, v_out: float,
                         omega_out: float, t):
    """gamma(t) lambda*(t) in closed form.

    Equals -|u v|(2|b|^2 + 1) + sqrt(|b|^2 + 1)|b| [2 v^2 cos(2 w t + d)
    + e^{-i(2 w t + d)}] with d = arg(alpha) - arg(beta); v < 0 makes the
    first term real negative.
    """
    b_mag = abs(coeffs.beta)
    a_mag = math.sqrt(b_mag * b_mag + 1.0)
    phase = 2.0 * omega_out * np.asarray(t, dtype=float) + coeffs.delta_k
    return (
        -abs(u_out * v_out) * (2.0 * b_mag * b_mag + 1.0)
        + a_mag * b_mag * (2.0 * v_out * v_out * np.cos(phase) + np.exp(-1j * phase))
    )


def gamma_lambda_at_tm(u_out: float, v_out: float, beta_sq: float) -> float:
    """Most negative value of gamma lambda*, attained at the times t_m."""
    return -(
        abs(u_out * v_out) * (2.0 * beta_sq + 1.0)
        + math.sqrt(beta_sq + 1.0) * math.sqrt(beta_sq) * (2.0 * v_out * v_out + 1.0)
    )


def optimal_time(delta_k: float, omega_out: float) -> float:
    """Smallest t_m >= 0 with (2 omega t_m + delta) mod 2 pi = pi.

    At t_m the product |gamma lambda*| (and with it |m_k|) is largest
    and the pair density correlator is smallest.
    """
    if omega_out <= 0:
        raise ValueError("omega_out must be positive")
    return ((math.pi - delta_k) % (2.0 * math.pi)) / (2.0 * omega_out)


class DensityCorrelator(NamedTuple):
    general: float
    at_tm: float
    mode_csi_violated: bool


def density_correlator(atom_number_N: float, n_k: float, m_k) -> DensityCorrelator:
    """Pair density correlator <rho_k rho_-k> = N (2 Re m + 2 n + 1).

    ``at_tm`` evaluates the same expression with Re m replaced by -|m|,
    2N(n - |m|) + N, its value at the optimal times; the two coincide
    when the inputs are taken at t_m.  The mode CSI is violated exactly
    when the t_m value drops below N, i.e. |m| > n.
    """
    m_abs = abs(m_k)
    general = atom_number_N * (2.0 * np.real(m_k) + 2.0 * n_k + 1.0)
    at_tm = 2.0 * atom_number_N * (n_k - m_abs) + atom_number_N
    return DensityCorrelator(float(general), float(at_tm), bool(m_abs > n_k))


def number_variance(n_k):
    """Var(n_hat) = n + n^2: shot noise plus the wave term."""
    return n_k + np.asarray(n_k, dtype=float) ** 2


@dataclass(frozen=True)
class ModeState:
    """Derived per-mode quantities at one out-region time."""

    lam: complex
    gam: complex
    n_k: float
    m_k: complex
    n_th: float
    t: float
    delta_k: float
    kappa_k: float

    @property
    def gamma_sq(self) -> float:
        return abs(self.gam) ** 2


def mode_state(coeffs: BogoCoefficients, u_out: float, v_out: float,
               omega_out: float, n_th: float, t: float) -> ModeState:
    """Assemble and validate the full mode state at time t."""
    lam, gam = total_coefficients(coeffs, u_out, v_out, omega_out, t)
    lam = complex(lam)
    gam = complex(gam)
    norm = abs(lam) ** 2 - abs(gam) ** 2
    if abs(norm - 1.0) / max(1.0, abs(lam) ** 2) > 1e-9:
        raise ValueError(f"|lambda|^2 - |gamma|^2 = {norm!r}, expected 1")
    g_sq = abs(gam) ** 2
    n_k = float(occupation(n_th, g_sq))
    m_k = complex(anomalous(n_th, lam, gam))
    if abs(m_k) ** 2 > n_k * (n_k + 1.0) * (1.0 + PHYSICALITY_TOL) + PHYSICALITY_TOL:
        raise ValueError("anomalous density exceeds the physical bound n(n+1)")
    v_sq = v_out * v_out
    b_sq = abs(coeffs.beta) ** 2
    if v_sq > 0.0 and b_sq > 0.0:
        kappa = math.sqrt((1.0 + 1.0 / v_sq) * (1.0 + 1.0 / b_sq))
    else:
        kappa = math.nan
    return ModeState(
        lam=lam, gam=gam, n_k=n_k, m_k=m_k, n_th=n_th, t=t,
        delta_k=coeffs.delta_k, kappa_k=kappa,
    )
