"""Exception types raised by photonbound."""


class PhotonBoundError(Exception):
    """Base class for every error raised by the library."""


class DegenerateStateError(PhotonBoundError, ValueError):
    """An amplitude has zero norm and cannot represent a physical state."""


class SizeLimitError(PhotonBoundError):
    """A dense tensor or loop would exceed the configured budget."""

    def __init__(self, message, limit=None, requested=None):
        super().__init__(message)
        self.limit = limit
        self.requested = requested


class TruncationError(PhotonBoundError):
    """A photon-number cutoff discards more probability than allowed."""


class ConvergenceError(PhotonBoundError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class BoundViolationError(PhotonBoundError):
    """A computed rate exceeds the multiphoton bound.

    This never signals physics; it means the quadrature or the
    implementation is broken for the offending state.
    """

    def __init__(self, message, state_hash=None, report=None):
        super().__init__(message)
        self.state_hash = state_hash
        self.report = report
