"""Linear evolution of quasiparticle mode pairs under a drive U(t).

The pair amplitudes S = (A, B^dag) obey dS/dt = M(t) S with

    M(t) = [[-i omega_k(t),  d log sqrt(omega_k)/dt],
            [ d log sqrt(omega_k)/dt,  +i omega_k(t)]].

The fundamental matrix phi (phi(t_from) = identity) has the Bogoliubov
group structure [[alpha*, beta], [beta*, alpha]] with |alpha|^2 - |beta|^2
= 1, preserved exactly by the flow (tr M = 0) and to integrator tolerance
numerically.  Smooth schedules are integrated with an adaptive embedded
Runge-Kutta on the four real components of the first column; jumps of
piecewise-constant schedules are applied as exact sudden-step matrices.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .core import SystemParams, dispersion
from .errors import IntegrationFailureError, UnsupportedRegimeError

DEFAULT_TOL = 1e-12

#: Amplitude below which the small-drive resonance condition omega_k =
#: omega_D / 2 is used instead of the effective two-level square-wave one.
A_SWITCH = 0.2


@dataclass(frozen=True)
class BogoCoefficients:
    """Complex transfer pair (alpha, beta) encoding the drive history."""

    alpha: complex
    beta: complex

    @property
    def normalization(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    @property
    def normalization_defect(self) -> float:
        """|(|alpha|^2 - |beta|^2) - 1| relative to the coefficient size.

        Relative because for strongly amplified modes the difference of
        two large squares cannot resolve an absolute 1e-9.
        """
        scale = max(1.0, abs(self.alpha) ** 2 + abs(self.beta) ** 2)
        return abs(self.normalization - 1.0) / scale

    def require_normalized(self, tol: float = 1e-9) -> "BogoCoefficients":
        if self.normalization_defect > tol:
            raise ValueError(
                f"|alpha|^2-|beta|^2 = {self.normalization!r} violates the "
                f"Bogoliubov constraint beyond tol={tol!r}"
            )
        return self

    @property
    def delta_k(self) -> float:
        """Phase difference arg(alpha) - arg(beta); 0 if beta vanishes."""
        if self.beta == 0:
            return 0.0
        return cmath.phase(self.alpha) - cmath.phase(self.beta)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex fundamental matrix in the (A, B^dag) basis.

    Rows are (alpha*, beta; beta*, alpha).  ``n_steps`` counts accepted
    integrator steps (0 for exact compositions) and feeds a conservative
    error estimate; the determinant defect is the monitored error proxy.
    """

    matrix: np.ndarray
    n_steps: int = 0
    tol: float = 0.0

    @property
    def alpha(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def beta(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def coefficients(self) -> BogoCoefficients:
        return BogoCoefficients(self.alpha, self.beta)

    @property
    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    @property
    def norm_defect(self) -> float:
        return self.coefficients.normalization_defect

    @property
    def error_estimate(self) -> float:
        """Conservative bound on the coefficient error of this matrix."""
        scale = max(1.0, abs(self.alpha), abs(self.beta))
        return max(self.norm_defect * scale, self.n_steps * self.tol * scale)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.matrix @ other.matrix,
            n_steps=self.n_steps + other.n_steps,
            tol=max(self.tol, other.tol),
        )

    def inverse(self) -> "TransferMatrix":
        return TransferMatrix(np.linalg.inv(self.matrix), self.n_steps, self.tol)

    def power(self, n: int) -> "TransferMatrix":
        return TransferMatrix(
            np.linalg.matrix_power(self.matrix, n), n_steps=self.n_steps, tol=self.tol
        )


def _group_matrix(top_left: complex, bottom_left: complex) -> np.ndarray:
    # first column determines the whole matrix through the group structure
    return np.array(
        [[top_left, np.conj(bottom_left)], [bottom_left, np.conj(top_left)]], dtype=complex
    )


def identity_transfer() -> TransferMatrix:
    return TransferMatrix(np.eye(2, dtype=complex))


def sudden_step(omega_1: float, omega_2: float) -> TransferMatrix:
    """Exact re-diagonalisation matrix for an instantaneous jump omega_1 -> omega_2.

    The field operators are continuous across the jump while the
    quasiparticle basis changes, giving the real Bogoliubov matrix with
    diagonal U12 = (sqrt(w2/w1) + sqrt(w1/w2))/2 and off-diagonal
    V12 = (sqrt(w2/w1) - sqrt(w1/w2))/2; U12^2 - V12^2 = 1.
    """
    if omega_1 <= 0 or omega_2 <= 0:
        raise ValueError("sudden_step needs positive frequencies on both sides")
    r = math.sqrt(omega_2 / omega_1)
    u12 = 0.5 * (r + 1.0 / r)
    v12 = 0.5 * (r - 1.0 / r)
    return TransferMatrix(np.array([[u12, v12], [v12, u12]], dtype=complex))


def _phase_segment(omega: float, duration: float) -> TransferMatrix:
    ph = cmath.exp(-1j * omega * duration)
    return TransferMatrix(np.array([[ph, 0.0], [0.0, np.conj(ph)]], dtype=complex))


def _omega_at(s, k: float, U: float) -> float:
    e_kin = 0.5 * k * k
    arg = e_kin * (e_kin + 2.0 * U * s.density)
    if arg <= 0.0:
        raise UnsupportedRegimeError(f"nonpositive omega^2 encountered (U={U!r})")
    return math.sqrt(arg)


def _ode_segment(s, k: float, t_a: float, t_b: float, tol: float) -> TransferMatrix:
    e_kin = 0.5 * k * k
    density = s.density

    def rhs(t, y):
        U = s.interaction_at(t)
        omega_sq = e_kin * (e_kin + 2.0 * U * density)
        if omega_sq <= 0.0:
            raise UnsupportedRegimeError(f"nonpositive omega^2 at t={t!r} (U={U!r})")
        omega = math.sqrt(omega_sq)
        rate = s.interaction_rate(t)
        g = 0.5 * e_kin * density * rate / omega_sq if rate != 0.0 else 0.0
        a, b, c, d = y
        return (omega * b + g * c, -omega * a + g * d, g * a - omega * d, g * b + omega * c)

    boundaries = [t_a] + list(s.ode_breakpoints(t_a, t_b)) + [t_b]
    y = np.array([1.0, 0.0, 0.0, 0.0])
    n_steps = 0
    for a, b in zip(boundaries, boundaries[1:]):
        if b <= a:
            continue
        sol = solve_ivp(
            rhs, (a, b), y, method="DOP853",
            rtol=tol, atol=tol * 1e-2, max_step=(b - a) / 4.0, dense_output=False,
        )
        if not sol.success:
            raise IntegrationFailureError(
                f"integration failed between t={a!r} and t={b!r}: {sol.message}",
                last_time=float(sol.t[-1]),
            )
        y = sol.y[:, -1]
        n_steps += len(sol.t) - 1
    top = complex(y[0], y[1])
    bottom = complex(y[2], y[3])
    return TransferMatrix(_group_matrix(top, bottom), n_steps=n_steps, tol=tol)


def propagate(s, k: float, t_from: float, t_to: float, tol: float = DEFAULT_TOL) -> TransferMatrix:
    """Fundamental matrix of the mode system from t_from to t_to.

    Piecewise-constant schedules compose exact phase segments and
    sudden-step jump matrices; smooth ones are integrated adaptively.
    Jump instants are attributed to the half-open window (t_from, t_to],
    so composition over adjacent windows reproduces the full evolution.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t_to < t_from:
        raise ValueError("t_to must not precede t_from")
    if t_from < s.t_in:
        raise ValueError(f"t_from={t_from!r} precedes the schedule start {s.t_in!r}")
    if t_to == t_from:
        return identity_transfer()

    exact = getattr(s, "kind", "") in ("constant", "square_wave", "piecewise_constant")
    jumps = s.jump_times(t_from, t_to)
    boundaries = [t_from] + jumps + ([] if jumps and jumps[-1] == t_to else [t_to])

    phi = identity_transfer()
    for a, b in zip(boundaries, boundaries[1:]):
        if b > a:
            if exact:
                # constant U on the open interval; evaluate mid-segment
                U = s.interaction_at(0.5 * (a + b))
                seg = _phase_segment(_omega_at(s, k, U), b - a)
            else:
                seg = _ode_segment(s, k, a, b, tol)
            phi = seg @ phi
        if b in jumps:
            w_before = _omega_at(s, k, s.interaction_before(b))
            w_after = _omega_at(s, k, s.interaction_at(b))
            phi = sudden_step(w_before, w_after) @ phi

    defect = phi.norm_defect
    if defect > max(1e-9, 100.0 * tol):
        raise IntegrationFailureError(
            f"Bogoliubov normalization defect {defect!r} exceeds tolerance", last_time=t_to
        )
    return phi


def monodromy(s, k: float, tol: float = DEFAULT_TOL) -> TransferMatrix:
    """One-drive-period fundamental matrix.

    Starts at the schedule phase t_in unless the schedule requests an
    offset window through ``monodromy_start`` (used by smoothed drives
    whose ramps would otherwise straddle the window edges); the Floquet
    trace and multipliers are invariant under that shift.
    """
    period = s.drive_period()
    if period is None:
        raise UnsupportedRegimeError("monodromy requires a periodic schedule")
    start = getattr(s, "monodromy_start", s.t_in)
    return propagate(s, k, start, start + period, tol)


def full_drive(s, k: float, tol: float = DEFAULT_TOL) -> TransferMatrix:
    """Transfer matrix over the whole drive window [t_in, 0].

    Periodic schedules are integrated over a single period and raised to
    the number of periods, which is exact because the window is an
    integer number of periods by construction.
    """
    if getattr(s, "kind", "") == "constant":
        # beta = 0; the overall phase carries no observable content
        return identity_transfer()
    period = s.drive_period()
    n_periods = getattr(s, "n_periods", 0)
    if period is not None and n_periods >= 1 and abs(s.t_in + n_periods * period) < 1e-9:
        return monodromy(s, k, tol).power(n_periods)
    return propagate(s, k, s.t_in, 0.0, tol)


def spectral_radius(M: TransferMatrix) -> float:
    """Largest Floquet multiplier magnitude of a one-period matrix."""
    re_alpha = M.alpha.real
    if abs(re_alpha) <= 1.0:
        return 1.0
    return abs(re_alpha) + math.sqrt(re_alpha * re_alpha - 1.0)


def is_unstable(M: TransferMatrix) -> bool:
    """Parametric instability: |Re alpha^(1)| > 1, i.e. |tr| > 2.

    The trace of the monodromy is 2 Re(alpha); the first resonance at
    omega_k = omega_D/2 is a period-doubling tongue with Re(alpha) < -1,
    so the modulus is required to flag it.  Re(alpha) is reported
    alongside through the matrix itself.
    """
    return abs(M.alpha.real) > 1.0


def growth_rate(M: TransferMatrix) -> float:
    """Per-period growth exponent log(spectral radius); 0 when stable."""
    return math.log(spectral_radius(M))


def _bracketed_root(f, k_hi: float):
    k_lo = 1e-9
    if f(k_lo) >= 0.0 or f(k_hi) <= 0.0:
        return None
    return brentq(f, k_lo, k_hi, xtol=1e-14, rtol=8.9e-16)


def resonance_estimate(s, params: SystemParams, branch: str = "auto"):
    """Predicted wavenumber of the first parametric resonance, or None.

    Small amplitudes: root of omega_k(U0) = omega_D / 2.  Large
    amplitudes: root of omega_k(U_max) + omega_k(U_min) = omega_D with
    U_max/min = U0 (1 +/- pi A / 3), the effective square-wave pair of
    the sinusoid.  ``branch`` is "auto" (switch at A = 0.2), "small" or
    "large".
    """
    period = s.drive_period()
    if period is None:
        raise UnsupportedRegimeError("resonance prediction requires a periodic schedule")
    omega_d = s.omega_D
    amp = abs(s.amplitude_A)
    if branch == "auto":
        branch = "small" if amp < A_SWITCH else "large"
    if branch not in ("small", "large"):
        raise ValueError(f"unknown resonance branch {branch!r}")

    k_hi = math.sqrt(2.0 * omega_d) * (1.0 + 1e-12)
    if branch == "small":
        return _bracketed_root(
            lambda k: dispersion(k, s.u0, params) - 0.5 * omega_d, k_hi
        )
    u_max = s.u0 * (1.0 + math.pi * amp / 3.0)
    u_min = s.u0 * (1.0 - math.pi * amp / 3.0)
    if u_min <= 0.0:
        return None
    return _bracketed_root(
        lambda k: dispersion(k, u_max, params) + dispersion(k, u_min, params) - omega_d,
        k_hi,
    )
