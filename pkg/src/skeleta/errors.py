"""Exception hierarchy shared by every module.

The CLI reports ``type(exc).__name__`` of these, so class names are part of
the user-facing surface.
"""


class SkeletaError(Exception):
    """Base class for domain errors."""


class GraphError(SkeletaError, ValueError):
    pass


class LoopLimitExceeded(SkeletaError):
    pass


class CoverError(SkeletaError, ValueError):
    pass


class ValuationError(SkeletaError, ValueError):
    pass


class ParameterError(SkeletaError, ValueError):
    pass


class CurrentError(SkeletaError, ValueError):
    pass


class WindowError(SkeletaError):
    """A tree window (or exponent range) is too small for the request."""


class SplitSaturated(WindowError):
    """The split oracle still splits at the largest allowed exponent."""


class RankDeficient(SkeletaError):
    def __init__(self, message, rank=None, null_space=()):
        super().__init__(message)
        self.rank = rank
        self.null_space = list(null_space)


class Inconsistent(SkeletaError):
    def __init__(self, message, row=None, residual=None):
        super().__init__(message)
        self.row = row
        self.residual = residual


class NoCandidate(SkeletaError):
    pass


class AmbiguousLength(SkeletaError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class Unsupported(SkeletaError):
    pass
