"""Exception types shared across polyflux."""


class ConfigurationError(ValueError):
    """Invalid run configuration.

    Attributes:
        key: Offending configuration key, when known
        line: 1-based line of the key in the config text, when known
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None) -> None:
        self.key = key
        self.line = line
        self.detail = message
        where = ""
        if key is not None:
            where = f"'{key}'" + (f" (line {line})" if line is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class DomainError(ValueError):
    """Rate function evaluated outside its domain (negative size)."""


class UnsupportedSpanError(ValueError):
    """Quadrature span for which no composite rule is defined."""


class DivergenceError(RuntimeError):
    """The numerical solution left the admissible range.

    Attributes:
        reason: Short machine-readable cause
        time: Simulation time (h) at which it was detected
    """

    def __init__(self, reason: str, time: float) -> None:
        self.reason = reason
        self.time = time
        super().__init__(f"diverged at t={time:.6g} h: {reason}")
