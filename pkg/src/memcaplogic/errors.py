"""Exception hierarchy."""


class MemcapError(Exception):
    """Base class for errors raised by memcaplogic."""


class DomainError(MemcapError, ValueError):
    """An argument lies outside the domain of an operation."""


class CollapseError(MemcapError):
    """A membrane reached the bottom plate (y <= -1).

    Attributes
    ----------
    device : int or None
        Zero-based index of the collapsed device, when known.
    tau : float or None
        Dimensionless time at which the collapse was detected.
    """

    def __init__(self, message, device=None, tau=None):
        super().__init__(message)
        self.device = device
        self.tau = tau


class SimulationError(MemcapError):
    """Integration produced a non-finite state."""

    def __init__(self, message, device=None, tau=None):
        super().__init__(message)
        self.device = device
        self.tau = tau


class ConfigError(MemcapError):
    """Configuration could not be parsed or failed validation.

    ``problems`` lists every violation found, one message per entry.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
