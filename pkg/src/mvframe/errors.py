"""Exception hierarchy for mvframe."""


class MvFrameError(Exception):
    """Base class for all library errors."""


class DimensionError(MvFrameError, ValueError):
    """Arguments live in different spaces or have incompatible shapes."""


class UnsupportedShapeError(MvFrameError, ValueError):
    pass


class PositivityError(MvFrameError, ValueError):
    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SingularOperatorError(MvFrameError, ValueError):
    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class IterationError(MvFrameError, RuntimeError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AdjointabilityError(MvFrameError, ValueError):
    """Operator is not adjointable for the matrix-valued inner product.

    ``witness`` is a pair of functions ``(f, g)`` with
    ``<Uf, g> != <f, U*g>``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NormConditionError(MvFrameError, ValueError):
    pass


class ZeroNormError(MvFrameError, ValueError):
    pass


class SelfAdjointnessError(MvFrameError, ValueError):
    pass


class CommutationError(MvFrameError, ValueError):
    pass


class MissingDualError(MvFrameError, ValueError):
    pass


class ConfigError(MvFrameError, ValueError):
    """Invalid experiment configuration; ``errors`` lists (path, message)."""

    def __init__(self, message, errors=()):
        super().__init__(message)
        self.errors = list(errors)
