"""Exception hierarchy shared by all xizeros modules."""


class XiZerosError(Exception):
    """Base class for every numerical failure raised by xizeros."""


class PoleError(XiZerosError, ValueError):
    """Argument sits on a pole (log-Gamma at a non-positive integer)."""


class InvalidCutoffError(XiZerosError):
    """Truncated integration interval leaves a tail above tolerance."""


class PhaseStepError(XiZerosError):
    """Consecutive samples of an argument path jump by pi/2 or more."""


class BoundaryUnresolvableError(XiZerosError):
    """A contour could not be certified zero-free after all dilations."""

    def __init__(self, message, rect=None):
        super().__init__(message)
        self.rect = rect


class SnapFailureError(XiZerosError):
    """Winding number stayed too far from an integer after refinement."""


class DenominatorUncertifiedError(XiZerosError):
    """Denominator of a ratio is indistinguishable from zero."""


class UnstableEstimateError(XiZerosError):
    """Sampled estimate has dispersion larger than its mean."""


class CrowdedNeighborhoodError(XiZerosError):
    """Two located zeros are too close to classify separately."""


class NotFoundError(XiZerosError):
    """A search exhausted its range without success."""


class Sigma0UncertifiedError(XiZerosError):
    """``h`` could not be certified nonzero along ``Re s = sigma0``."""
