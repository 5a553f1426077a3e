"""Classical-field reference: equipartition initial conditions, the same
linear transfer as the quantum theory, and Gaussian (Isserlis) moments.

The field modes start in a classical canonical ensemble with occupation
T / omega and are pushed through the identical transfer coefficients;
the only differences from the quantum ladder are the missing spontaneous
terms and the missing commutator (+1 / shot-noise) bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import evolution, quantum
from .core import SystemParams, bogoliubov_uv, classical_thermal_occupation


def classical_occupation(n_cl_th, gamma_sq):
    """n_cl = (2 |gamma|^2 + 1) n_cl_th; no spontaneous term, so 0 at T = 0."""
    return (2.0 * gamma_sq + 1.0) * n_cl_th


def classical_anomalous_sq(n_cl_th, gamma_sq):
    """|m_cl|^2 = 4 (|gamma|^2 + 1) |gamma|^2 n_cl_th^2."""
    return 4.0 * (gamma_sq + 1.0) * gamma_sq * np.asarray(n_cl_th, dtype=float) ** 2


def classical_anomalous(n_cl_th, gamma_lambda):
    """Complex classical pair correlator m_cl = 2 gamma lambda* n_cl_th."""
    return 2.0 * gamma_lambda * n_cl_th


def classical_tmv(n_cl_th, gamma_sq):
    """Classical two-mode variance V_cl = n_cl_th / (2 |gamma|^2 + 1)."""
    return n_cl_th / (2.0 * gamma_sq + 1.0)


def classical_subpoissonian_threshold(n_cl_th):
    """V_cl < 1 exactly when |gamma|^2 exceeds n_cl_th(T/2) - 1/2 = n_cl_th/2 - 1/2."""
    return 0.5 * np.asarray(n_cl_th, dtype=float) - 0.5


class ClassicalDensityCorrelator(NamedTuple):
    general: float
    at_tm: float


def classical_density_correlator(atom_number_N: float, n_cl: float,
                                 m_cl) -> ClassicalDensityCorrelator:
    """E(rho_k rho_-k) = N (2 Re m_cl + 2 n_cl): no quantum-noise floor.

    ``at_tm`` is the optimal-time value 2 N (n_cl - |m_cl|); the quantum
    expression on the same inputs exceeds either form by exactly N.
    """
    general = atom_number_N * (2.0 * np.real(m_cl) + 2.0 * n_cl)
    at_tm = 2.0 * atom_number_N * (n_cl - abs(m_cl))
    return ClassicalDensityCorrelator(float(general), float(at_tm))


def classical_number_variance(n_cl):
    """Classical intensity variance n_cl^2: the wave term without shot noise."""
    return np.asarray(n_cl, dtype=float) ** 2


@dataclass(frozen=True)
class ClassicalModeState:
    """Classical per-mode quantities at one out-region time."""

    n_cl_th: float
    n_cl: float
    m_cl: complex
    t: float


def classical_mode_state(coeffs: evolution.BogoCoefficients, u_out: float, v_out: float,
                         omega_out: float, n_cl_th: float, t: float) -> ClassicalModeState:
    lam, gam = quantum.total_coefficients(coeffs, u_out, v_out, omega_out, t)
    g_sq = abs(complex(gam)) ** 2
    return ClassicalModeState(
        n_cl_th=n_cl_th,
        n_cl=float(classical_occupation(n_cl_th, g_sq)),
        m_cl=complex(classical_anomalous(n_cl_th, complex(gam) * complex(lam).conjugate())),
        t=t,
    )


@dataclass(frozen=True)
class EnsembleEstimate:
    """Monte Carlo moments of the classical ensemble with standard errors."""

    sample_count: int
    rng_seed: int
    mean_intensity: float
    se_mean_intensity: float
    intensity_auto: float
    se_intensity_auto: float
    intensity_cross: float
    se_intensity_cross: float
    anomalous: complex
    se_anomalous_re: float
    se_anomalous_im: float
    v_cl: float
    se_v_cl: float


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = x.size
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(n))


def monte_carlo_ensemble(s, k: float, temperature: float, params: SystemParams,
                         sample_count: int, seed: int, t: float = 0.0,
                         tol: float = evolution.DEFAULT_TOL) -> EnsembleEstimate:
    """Empirical classical moments from independent Gaussian quasiparticle draws.

    Draws complex amplitudes A, B with <|A|^2> = T / omega_in and
    <A B> = 0, pushes each through the same transfer coefficients as the
    closed forms, and estimates the first, second and fourth moments with
    standard errors (delta method for the variance ratio V_cl).  The
    generator is counter-based (Philox) keyed on ``seed``, so the stream
    is reproducible and independent of any worker layout.
    """
    if sample_count < 1000:
        raise ValueError("sample_count below 1000 is refused; errors would be meaningless")
    u_out, v_out = bogoliubov_uv(k, s.interaction_at(0.0), params)
    omega_out = math.sqrt((0.5 * k * k) * (0.5 * k * k + 2.0 * s.interaction_at(0.0) * params.density_n))
    omega_in = math.sqrt((0.5 * k * k) * (0.5 * k * k + 2.0 * s.interaction_at(s.t_in) * params.density_n))
    n_cl_th = classical_thermal_occupation(omega_in, temperature)

    coeffs = evolution.full_drive(s, k, tol).coefficients
    lam, gam = quantum.total_coefficients(coeffs, u_out, v_out, omega_out, t)
    lam = complex(lam)
    gam = complex(gam)

    rng = np.random.Generator(np.random.Philox(key=seed))
    scale = math.sqrt(0.5 * n_cl_th)
    draws = rng.standard_normal((4, sample_count))
    amp_a = scale * (draws[0] + 1j * draws[1])
    amp_b = scale * (draws[2] + 1j * draws[3])

    a = np.conj(lam) * amp_a + gam * np.conj(amp_b)
    b = np.conj(lam) * amp_b + gam * np.conj(amp_a)
    i_a = np.abs(a) ** 2
    i_b = np.abs(b) ** 2

    mean_i, se_i = _mean_se(i_a)
    auto, se_auto = _mean_se(i_a * i_a)
    cross, se_cross = _mean_se(i_a * i_b)
    ab = a * b
    anom_re, se_re = _mean_se(ab.real)
    anom_im, se_im = _mean_se(ab.imag)

    # V_cl = (E(IaIa) - E(IaIb)) / E(Ia) as a ratio of sample means
    num = i_a * i_a - i_a * i_b
    v_hat = float(np.mean(num) / mean_i)
    cov = np.cov(np.vstack([num, i_a]), ddof=1)
    var_v = (cov[0, 0] - 2.0 * v_hat * cov[0, 1] + v_hat * v_hat * cov[1, 1]) / (
        sample_count * mean_i * mean_i
    )
    se_v = math.sqrt(max(var_v, 0.0))

    return EnsembleEstimate(
        sample_count=sample_count,
        rng_seed=seed,
        mean_intensity=mean_i,
        se_mean_intensity=se_i,
        intensity_auto=auto,
        se_intensity_auto=se_auto,
        intensity_cross=cross,
        se_intensity_cross=se_cross,
        anomalous=complex(anom_re, anom_im),
        se_anomalous_re=se_re,
        se_anomalous_im=se_im,
        v_cl=v_hat,
        se_v_cl=se_v,
    )
