"""
Exception hierarchy for the pose uncertainty library
"""
from typing import Optional, Sequence


class SlueError(Exception):
    """Base class for every library error"""


class InputError(SlueError, ValueError):
    """A precondition on the caller's input does not hold"""


class ChiralityError(InputError):
    """A point lies on or behind the camera plane"""


class CertificationError(SlueError):
    """No ellipsoid could be certified at the requested order"""

    def __init__(self, message: str = "no ellipsoid certified at this order",
                 axes: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.axes = list(axes or [])


class UnboundedSetError(CertificationError):
    """The constraint set is unbounded along the reported axes"""

    def __init__(self, axes: Sequence[int], message: Optional[str] = None):
        super().__init__(
            message or f"constraint set unbounded in some direction (axes {list(axes)})",
            axes=axes,
        )


class DegenerateSetError(CertificationError):
    """The log-determinant is unbounded above: the set has empty interior in a subspace"""

    def __init__(self, axes: Sequence[int], message: Optional[str] = None):
        super().__init__(
            message or f"constraint set is degenerate along axes {list(axes)}",
            axes=axes,
        )


class NumericalSolveError(SlueError):
    """The conic solver failed to return a usable solution"""

    def __init__(self, status: str, message: Optional[str] = None):
        super().__init__(message or f"solver failed with status '{status}'")
        self.status = status


class DegenerateBoundError(SlueError):
    """An ellipsoid is singular along coordinates that a projection needs"""

    def __init__(self, axes: Sequence[int], message: Optional[str] = None):
        super().__init__(message or f"degenerate bound along axes {list(axes)}")
        self.axes = list(axes)
