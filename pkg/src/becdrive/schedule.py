"""Interaction protocols U(t) and the rates the mode equation needs.

A schedule covers the drive window [t_in, 0]; for t >= 0 the interaction
is held at U(0), defining the out-region.  All kinds expose U(t), dU/dt
and the jump times at which dU/dt is distributional (handled by the
evolution module through sudden re-diagonalisation, never by the ODE).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("constant", "sinusoid", "square_wave", "piecewise_constant", "sampled")

_JUMP_EPS = 1e-12


@dataclass(frozen=True)
class InteractionSchedule:
    """Interaction protocol; immutable after construction.

    Construct through :func:`constant`, :func:`sinusoid`,
    :func:`square_wave`, :func:`piecewise_constant` or :func:`sampled`.
    """

    kind: str
    u0: float
    amplitude_A: float = 0.0
    omega_D: float = 0.0
    n_periods: int = 0
    segments: tuple = ()
    sample_values: tuple = ()
    sample_dt: float = 0.0
    t_in: float = -math.inf

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.u0 <= 0:
            raise ValueError("baseline interaction u0 must be positive")

    # -- protocol ---------------------------------------------------------

    @property
    def density(self) -> float:
        # unit convention mu0 = u0 * n = 1 pins the density
        return 1.0 / self.u0

    def interaction_at(self, t: float) -> float:
        """U(t), held constant at U(0) for t >= 0."""
        if t < self.t_in:
            raise ValueError(f"t={t!r} precedes the schedule start t_in={self.t_in!r}")
        t = min(t, 0.0)
        if self.kind == "constant":
            return self.u0
        if self.kind == "sinusoid":
            return self.u0 * (1.0 + self.amplitude_A * math.sin(self.omega_D * t))
        if self.kind == "square_wave":
            return self._square_value(t)
        if self.kind == "piecewise_constant":
            return self._segment_value(t)
        return self._sampled_value(t)

    def interaction_before(self, t: float) -> float:
        """Left limit U(t^-); differs from U(t) only at jump instants."""
        if self.kind == "square_wave":
            return self._square_value(t, before=True)
        if self.kind == "piecewise_constant":
            return self._segment_value(t, before=True)
        return self.interaction_at(t)

    def interaction_rate(self, t: float) -> float:
        """dU/dt at t; raises at jump instants of discontinuous kinds."""
        if t < self.t_in:
            raise ValueError(f"t={t!r} precedes the schedule start t_in={self.t_in!r}")
        if self.kind in ("constant",):
            return 0.0
        if t > 0.0:
            # out-region: U is held at U(0); at t = 0 itself the drive
            # branch still applies (left limit of the switch-off)
            return 0.0
        t = min(t, 0.0)
        if self.kind == "sinusoid":
            return self.u0 * self.amplitude_A * self.omega_D * math.cos(self.omega_D * t)
        if self.kind in ("square_wave", "piecewise_constant"):
            for tj in self.jump_times(self.t_in, 0.0):
                if abs(t - tj) <= _JUMP_EPS * max(1.0, abs(tj)):
                    raise ValueError(
                        f"U(t) jumps at t={tj!r}; the delta in d log sqrt(omega)/dt "
                        "is handled by evolution.sudden_step, not by differentiation"
                    )
            return 0.0
        return self._sampled_rate(t)

    def jump_times(self, t_from: float, t_to: float) -> list:
        """Discontinuity instants in the half-open window (t_from, t_to]."""
        if self.kind == "square_wave":
            half = math.pi / self.omega_D
            times = [self.t_in + j * half for j in range(1, 2 * self.n_periods + 1)]
        elif self.kind == "piecewise_constant":
            times, acc = [], self.t_in
            for (dur, _), (_, u_next) in zip(self.segments, self.segments[1:]):
                acc += dur
                times.append(acc)
            times = [
                tj
                for tj, ((_, u_a), (_, u_b)) in zip(times, zip(self.segments, self.segments[1:]))
                if u_a != u_b
            ]
        else:
            return []
        return [tj for tj in times if t_from < tj <= t_to]

    def drive_period(self):
        """2 pi / omega_D for periodic kinds, None otherwise."""
        if self.kind in ("sinusoid", "square_wave"):
            return 2.0 * math.pi / self.omega_D
        return None

    def ode_breakpoints(self, t_from: float, t_to: float) -> list:
        """Extra integration boundaries for smooth kinds (none by default)."""
        return []

    # -- kind internals ---------------------------------------------------

    def _square_value(self, t: float, before: bool = False) -> float:
        lo = self.u0 * (1.0 - math.pi * self.amplitude_A / 4.0)
        hi = self.u0 * (1.0 + math.pi * self.amplitude_A / 4.0)
        t = min(t, 0.0)
        period = 2.0 * math.pi / self.omega_D
        phase = (t - self.t_in) / period
        if before:
            phase -= _JUMP_EPS
        frac = phase - math.floor(phase)
        return lo if frac < 0.5 else hi

    def _segment_value(self, t: float, before: bool = False) -> float:
        t = min(t, 0.0)
        acc = self.t_in
        for dur, u in self.segments:
            acc += dur
            if t < acc or (before and t <= acc):
                return u
        return self.segments[-1][1]

    def _sampled_value(self, t: float) -> float:
        ts = self.t_in + self.sample_dt * np.arange(len(self.sample_values))
        return float(np.interp(min(t, 0.0), ts, self.sample_values))

    def _sampled_rate(self, t: float) -> float:
        idx = int((t - self.t_in) / self.sample_dt)
        idx = min(max(idx, 0), len(self.sample_values) - 2)
        return (self.sample_values[idx + 1] - self.sample_values[idx]) / self.sample_dt


def constant(u0: float) -> InteractionSchedule:
    """Time-independent interaction; the whole history is the out-region."""
    return InteractionSchedule(kind="constant", u0=u0)


def sinusoid(u0: float, amplitude_A: float, omega_D: float, n_periods: int) -> InteractionSchedule:
    """U(t) = U0 (1 + A sin(omega_D t)) over n_periods, switch-off at t = 0.

    t_in = -n_periods * 2 pi / omega_D, so U(0) = U0 exactly and the
    out-region frequency is the baseline one.
    """
    if not abs(amplitude_A) < 1.0:
        raise ValueError("sinusoid requires |A| < 1 to keep U(t) > 0")
    if omega_D <= 0 or n_periods < 1:
        raise ValueError("omega_D must be positive and n_periods >= 1")
    t_in = -n_periods * 2.0 * math.pi / omega_D
    return InteractionSchedule(
        kind="sinusoid", u0=u0, amplitude_A=amplitude_A, omega_D=omega_D,
        n_periods=int(n_periods), t_in=t_in,
    )


def square_wave(u0: float, amplitude_A: float, omega_D: float, n_periods: int) -> InteractionSchedule:
    """Square wave of amplitude pi A / 4 about U0, starting on the low segment.

    Switches every half period; after the integer number of periods the
    final jump lands on the low value, so U(t >= 0) = U0 (1 - pi A / 4).
    """
    if not abs(amplitude_A) * math.pi / 4.0 < 1.0:
        raise ValueError("square wave requires pi |A| / 4 < 1 to keep U(t) > 0")
    if omega_D <= 0 or n_periods < 1:
        raise ValueError("omega_D must be positive and n_periods >= 1")
    t_in = -n_periods * 2.0 * math.pi / omega_D
    return InteractionSchedule(
        kind="square_wave", u0=u0, amplitude_A=amplitude_A, omega_D=omega_D,
        n_periods=int(n_periods), t_in=t_in,
    )


def piecewise_constant(u0: float, segments) -> InteractionSchedule:
    """Piecewise-constant protocol from (duration, U) pairs ending at t = 0."""
    segs = tuple((float(d), float(u)) for d, u in segments)
    if not segs:
        raise ValueError("piecewise_constant needs at least one segment")
    if any(d <= 0 for d, _ in segs):
        raise ValueError("segment durations must be positive")
    if any(u <= 0 for _, u in segs):
        raise ValueError("U(t) must stay positive on every segment")
    t_in = -sum(d for d, _ in segs)
    return InteractionSchedule(kind="piecewise_constant", u0=u0, segments=segs, t_in=t_in)


def sampled(u0: float, values, dt: float) -> InteractionSchedule:
    """Uniformly sampled U table, linearly interpolated, last sample at t = 0."""
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise ValueError("sampled schedule needs at least two samples")
    if dt <= 0:
        raise ValueError("sample spacing dt must be positive")
    if any(v <= 0 for v in vals):
        raise ValueError("U(t) must stay positive at every sample")
    t_in = -dt * (len(vals) - 1)
    return InteractionSchedule(
        kind="sampled", u0=u0, sample_values=vals, sample_dt=float(dt), t_in=t_in
    )


class TanhSquareWave:
    """Smooth tanh approximation of :func:`square_wave` (transition width eps).

    Shares the duck-typed schedule protocol so it can be pushed through
    the generic ODE integrator; used to cross-validate the sudden-step
    composition against a fully continuous drive.
    """

    def __init__(self, u0: float, amplitude_A: float, omega_D: float,
                 n_periods: int, width: float):
        if width <= 0:
            raise ValueError("transition width must be positive")
        self.kind = "tanh_square"
        self.u0 = u0
        self.amplitude_A = amplitude_A
        self.omega_D = omega_D
        self.n_periods = int(n_periods)
        self.width = width
        self.t_in = -n_periods * 2.0 * math.pi / omega_D
        half = math.pi / omega_D
        self._transitions = [self.t_in + j * half for j in range(1, 2 * n_periods + 1)]
        # one-period windows must not cut a ramp in half: shift the
        # Floquet window to start mid-segment (trace is shift-invariant)
        self.monodromy_start = self.t_in + half / 2.0

    @property
    def density(self) -> float:
        return 1.0 / self.u0

    def _profile(self, t: float) -> float:
        f = -1.0
        for j, tj in enumerate(self._transitions):
            sign = 1.0 if j % 2 == 0 else -1.0
            f += sign * (math.tanh((t - tj) / self.width) + 1.0)
        return f

    def interaction_at(self, t: float) -> float:
        if t < self.t_in:
            raise ValueError(f"t={t!r} precedes the schedule start t_in={self.t_in!r}")
        return self.u0 * (1.0 + math.pi * self.amplitude_A / 4.0 * self._profile(t))

    def interaction_before(self, t: float) -> float:
        return self.interaction_at(t)

    def interaction_rate(self, t: float) -> float:
        if t < self.t_in:
            raise ValueError(f"t={t!r} precedes the schedule start t_in={self.t_in!r}")
        df = 0.0
        for j, tj in enumerate(self._transitions):
            x = (t - tj) / self.width
            if abs(x) > 350.0:
                continue  # sech^2 underflows to zero far from the transition
            sign = 1.0 if j % 2 == 0 else -1.0
            df += sign / (math.cosh(x) ** 2 * self.width)
        return self.u0 * math.pi * self.amplitude_A / 4.0 * df

    def jump_times(self, t_from: float, t_to: float) -> list:
        return []

    def drive_period(self):
        return 2.0 * math.pi / self.omega_D

    def ode_breakpoints(self, t_from: float, t_to: float) -> list:
        pts = []
        for tj in self._transitions:
            for edge in (tj - 50.0 * self.width, tj + 50.0 * self.width):
                if t_from < edge < t_to:
                    pts.append(edge)
        return sorted(pts)


def interaction_at(s, t: float) -> float:
    """U(t) of a schedule, with the out-region held at U(0)."""
    return s.interaction_at(t)


def log_freq_derivative(s, k: float, t: float) -> float:
    """d log sqrt(omega_k) / dt = (e_kin n dU/dt) / (2 omega_k^2).

    Follows from the dispersion by the chain rule; undefined exactly at
    square-wave or piecewise jumps, where the caller must apply
    :func:`becdrive.evolution.sudden_step` instead.
    """
    rate = s.interaction_rate(t)
    if rate == 0.0:
        return 0.0
    e_kin = 0.5 * k * k
    omega_sq = e_kin * (e_kin + 2.0 * s.interaction_at(t) * s.density)
    return 0.5 * e_kin * s.density * rate / omega_sq


def drive_period(s):
    """One drive period for periodic kinds, None for aperiodic ones."""
    return s.drive_period()
