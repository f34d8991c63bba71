"""Exception and warning types shared across the package."""


class RydressError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(RydressError):
    """Invalid run configuration or schedule parameters."""


class IntegrationError(RydressError):
    """Time propagation failed (step underflow or tolerance failure).

    Carries the time at which the integrator gave up in ``t_fail``.
    """

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class ExtractionError(RydressError):
    """Gate-angle extraction rejected the input (e.g. large leakage)."""


class CalibrationError(RydressError):
    """Schedule calibration could not reach its target."""


class BlockadeWarning(UserWarning):
    """Interaction strength too weak for the blockade assumption."""


class DegeneracyWarning(UserWarning):
    """Near-degenerate eigenvalues make branch tracking unreliable."""


class FiniteDifferenceWarning(UserWarning):
    """Finite-difference step too large for a trustworthy derivative."""
