"""Exception hierarchy shared by all modules."""


class ThermalizeError(Exception):
    """Base class for every error raised by this package."""


class SpecError(ThermalizeError, ValueError):
    """Malformed system, bath or shell description."""


class CapExceeded(ThermalizeError):
    """Raised when an exact count exceeds an enumeration cap."""

    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"shell holds {count} states, cap is {cap}")


class EmptyShell(ThermalizeError):
    """No level of the system admits any bath state in the shell."""


class NonPositiveEnergy(ThermalizeError, ValueError):
    """Available bath energy is zero or negative."""


class NonPositiveDenominator(ThermalizeError, ValueError):
    pass


class DegenerateFit(ThermalizeError):
    pass


class DegenerateGap(ThermalizeError, ValueError):
    pass


class ConfigError(ThermalizeError):
    """Invalid experiment configuration; carries the offending line when known."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
