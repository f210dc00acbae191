"""Exception types shared across the toolkit."""


class PhylabError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PhylabError, ValueError):
    """A configuration value or combination of values is invalid."""


class AlignmentError(PhylabError, ValueError):
    """Stream lengths do not line up with the declared framing."""


class DecodeFailure(PhylabError):
    """A block decoder could not produce a codeword within its radius."""


class DivergenceError(PhylabError, RuntimeError):
    """An adaptive filter blew up; try a smaller step size."""


class EmptySpectrumError(ConfigError):
    """No error event exists at or below the requested distance."""

    def __init__(self, message: str, d_free: int | None = None):
        super().__init__(message)
        self.d_free = d_free


class IllConditionedError(PhylabError, ValueError):
    """A least-squares system is rank deficient or numerically singular."""
