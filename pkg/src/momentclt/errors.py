"""Exception hierarchy shared by every module of the package."""


class MomentCLTError(Exception):
    """Base class for all errors raised by momentclt."""


class ArgumentError(MomentCLTError, ValueError):
    """An argument violates an operation's precondition."""


class SizeError(MomentCLTError):
    """A combinatorial or memory cap would be exceeded."""


class ModelError(MomentCLTError):
    """A process model is malformed (non-stochastic matrix, non-summable coefficients, ...)."""


class ExistenceError(ModelError):
    """An ARMA recursion admits no stationary solution (unit-circle root of the reduced polynomial)."""


class NumericalError(MomentCLTError):
    """A numerical result failed its sanity check (e.g. residual imaginary parts)."""


class ConfigError(MomentCLTError):
    """An experiment configuration is invalid. ``key`` names the offending dotted key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
