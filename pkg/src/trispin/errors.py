"""Exception hierarchy. Every error raised on purpose derives from TrispinError."""


class TrispinError(Exception):
    pass


class ZeroCollision(TrispinError, ZeroDivisionError):
    pass


class NonUniformTunneling(TrispinError, ValueError):
    pass


class VariantMismatch(TrispinError, ValueError):
    pass


class TooFewSites(TrispinError, ValueError):
    pass


class BadTriple(TrispinError, ValueError):
    pass


class DimensionLimit(TrispinError, ValueError):
    pass


class ConvergenceFailure(TrispinError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GridEmpty(TrispinError, ValueError):
    pass


class SiteOutOfRange(TrispinError, IndexError):
    pass


class QuadratureFailure(TrispinError, RuntimeError):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class InsufficientData(TrispinError, ValueError):
    pass


class BadBlock(TrispinError, ValueError):
    pass


class NotPSD(TrispinError, ValueError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ScheduleShapeMismatch(TrispinError, ValueError):
    pass


class PointerLost(TrispinError, RuntimeError):
    pass


class ConfigError(TrispinError, ValueError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
