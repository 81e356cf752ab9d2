"""
Named errors raised across idca.  Input problems subclass ValueError, numerical failures subclass RuntimeError, so
callers catching the builtins keep working.
"""


class DimensionMismatchError(ValueError):
    pass


class InfeasibleConstraintSetError(ValueError):
    pass


class EtaTooSmallError(ValueError):
    """Explicit eta does not clear the spectral bound of its variant, carries the required bound"""

    def __init__(self, message: str, bound: float = None):
        super().__init__(message)
        self.bound = bound


class NonSymmetricError(ValueError):
    pass


class InfeasiblePointError(ValueError):
    pass


class TooManyConstraintsError(ValueError):
    pass


class EmptyFaceError(ValueError):
    pass


class VariantMismatchError(ValueError):
    pass


class InvalidGammaError(ValueError):
    pass


class TraceTooShortError(ValueError):
    pass


class NoComponentsError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    pass


class ProblemFileError(ValueError):
    pass


class InfeasibleRegionError(ValueError):
    pass


class NoConvergenceError(RuntimeError):
    pass


class NumericalFailureError(RuntimeError):
    pass


class CycleGuardExceededError(RuntimeError):
    pass
