"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the model."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, value=float("nan"), error_estimate=float("nan")):
        super().__init__(f"{message} (value={value!r}, error estimate={error_estimate!r})")
        self.value = value
        self.error_estimate = error_estimate


class ZeroOutageError(ValueError):
    """An outage curve is exactly zero where a log-log fit needs it positive."""
