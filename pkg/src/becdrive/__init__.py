"""Driven Bogoliubov excitations of a homogeneous condensate.

Evolves quasiparticle mode pairs under an arbitrary interaction
schedule, derives the full quantum and classical-field observable
ladders side by side and evaluates the squeezing / correlation
criteria in both theories.
"""

__version__ = "0.1.0"

from .core import (
    SystemParams,
    ModePhysics,
    bogoliubov_uv,
    classical_thermal_occupation,
    dispersion,
    mode_physics,
    shell_weights,
    thermal_occupation,
)
from .errors import ConfigError, IntegrationFailureError, UnsupportedRegimeError
from .evolution import (
    BogoCoefficients,
    TransferMatrix,
    full_drive,
    growth_rate,
    is_unstable,
    monodromy,
    propagate,
    resonance_estimate,
    spectral_radius,
    sudden_step,
)
from .experiments import (
    ObservableRecord,
    Scenario,
    StabilityChart,
    high_t_convergence,
    run_v_trace,
    spectrum_sweep,
    stability_chart,
)
from .schedule import (
    InteractionSchedule,
    TanhSquareWave,
    constant,
    drive_period,
    interaction_at,
    log_freq_derivative,
    piecewise_constant,
    sampled,
    sinusoid,
    square_wave,
)

__all__ = [
    "__version__",
    "SystemParams", "ModePhysics", "bogoliubov_uv", "dispersion", "mode_physics",
    "thermal_occupation", "classical_thermal_occupation", "shell_weights",
    "ConfigError", "IntegrationFailureError", "UnsupportedRegimeError",
    "BogoCoefficients", "TransferMatrix", "propagate", "sudden_step", "monodromy",
    "full_drive", "is_unstable", "growth_rate", "spectral_radius", "resonance_estimate",
    "InteractionSchedule", "TanhSquareWave", "constant", "sinusoid", "square_wave",
    "piecewise_constant", "sampled", "interaction_at", "log_freq_derivative", "drive_period",
    "Scenario", "ObservableRecord", "StabilityChart", "run_v_trace", "spectrum_sweep",
    "stability_chart", "high_t_convergence",
]
