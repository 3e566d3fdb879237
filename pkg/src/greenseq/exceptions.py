"""Error hierarchy.

Every error raised on purpose by the library derives from :class:`GreenSeqError` and
carries its context as attributes, so the CLI can report it as JSON.
"""

from __future__ import annotations

from typing import Any, Dict


class GreenSeqError(RuntimeError):
    """Base class of all domain errors."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        payload.update(self.context)
        return payload


class IndexOutOfRange(GreenSeqError):
    """Raised when a vertex index is not a mutable vertex."""


class MalformedQuiver(GreenSeqError):
    """Raised for loops, 2-cycles, frozen-frozen arrows or non skew-symmetric matrices."""


class SignCoherenceViolation(GreenSeqError):
    """Raised when a c-vector is zero or mixes signs."""


class IntegerOverflow(GreenSeqError):
    """Raised when an entry leaves the signed 64-bit range."""


class NotGreenAtStep(GreenSeqError):
    """Raised when a sequence asks to mutate a red vertex."""

    def __init__(self, step: int, vertex: int) -> None:
        super().__init__(f"vertex {vertex} is red at step {step}", step=step, vertex=vertex)
        self.step = step
        self.vertex = vertex


class ResourceLimit(GreenSeqError):
    """Raised when a search exceeds its node budget."""


class ReplayMismatch(GreenSeqError):
    """Raised when no green vertex carries the c-vector a restriction replay needs."""


class UnsupportedClass(GreenSeqError):
    """Raised when a formula or construction is requested for an unknown class."""


class BadIndex(GreenSeqError):
    """Raised when a direct-sum tail or head lies outside its summand."""


class HypothesisViolated(GreenSeqError):
    """Raised when two connecting arrows of a direct sum join the same pair of vertices."""


class NotABranchQuiver(GreenSeqError):
    """Raised when the vertices outside a core cannot be attached as type A branches."""


class PreconditionViolated(GreenSeqError):
    """Raised when an affine core does not meet the component construction hypotheses."""


class ConstructionInvariantViolated(GreenSeqError):
    """Raised when a construction leaves its proven path. Always a bug."""


class ArcNotInTriangulation(GreenSeqError):
    """Raised when flipping an arc that is not in the triangulation."""


class NotComplete(GreenSeqError):
    """Raised when the arcs about a marked point split into several fans."""


class NotTypeIVCore(GreenSeqError):
    """Raised when classification data does not describe a Type IV core."""


class MalformedTriangulation(GreenSeqError):
    """Raised for arc sets that are not tagged triangulations of the punctured disk."""
