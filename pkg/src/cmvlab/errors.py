"""Exception hierarchy shared by all cmvlab modules."""


class CMVError(Exception):
    """Base class for cmvlab errors."""


class ParameterError(CMVError, ValueError):
    """Invalid argument: empty interval, malformed literal, out-of-range epsilon."""


class DomainError(CMVError, ValueError):
    """A value lies outside its mathematical domain (e.g. |alpha| >= 1)."""


class SingularSystemError(CMVError, ArithmeticError):
    """The spectral parameter is (numerically) an eigenvalue of the block."""

    def __init__(self, z, message=None):
        self.z = complex(z)
        super().__init__(message or f"z = {self.z!r} is an eigenvalue of the block (singular system)")


class NumericalFailure(CMVError, RuntimeError):
    """A numerical routine did not meet its accuracy contract."""
