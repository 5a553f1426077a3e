"""Exception types shared across the package."""


class UnsupportedRegimeError(ValueError):
    """Raised for physically meaningful but unsupported inputs (e.g. U < 0)."""


class IntegrationFailureError(RuntimeError):
    """Raised when the ODE integrator cannot reach the requested time.

    Carries ``last_time``, the last time the integrator is known to be good.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


class ConfigError(ValueError):
    """Raised for malformed or out-of-schema scenario configuration."""
