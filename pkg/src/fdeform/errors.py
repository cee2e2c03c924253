"""Exception hierarchy shared by all fdeform modules."""


class FDeformError(Exception):
    """Base class for every error raised by the engine."""


class NegativeDeformation(FDeformError, ValueError):
    pass


class SeparableMisuse(FDeformError, TypeError):
    """A joint f^2 was requested from a separable spec, or vice versa."""


class OutOfRange(FDeformError, IndexError):
    """Occupation numbers fall outside a tabulated custom deformation."""


class InvalidDeformation(FDeformError, ValueError):
    """Validation of a deformation failed; ``report`` holds the details."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.failures) or "invalid deformation")


class CapExceeded(FDeformError, RuntimeError):
    pass


class NotSymmetric(FDeformError, ValueError):
    pass


class TailTooLarge(FDeformError, RuntimeError):
    pass


class ZeroIntensity(FDeformError, ZeroDivisionError):
    pass
