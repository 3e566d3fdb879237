"""Documents read and written by the command line, validated with pydantic."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .constants import NOTCHED, PLAIN
from .disk import TaggedArc, TaggedTriangulation, arc_from_dict
from .exceptions import MalformedQuiver
from .quiver_core import IceQuiver, Quiver, arrow_view


class QuiverDocument(BaseModel):
    """``{"n", "frozen", "arrows": [[src, tgt, mult], ...]}`` or ``{"matrix": [[...], ...]}``."""

    model_config = ConfigDict(extra="forbid")

    n: Optional[int] = Field(default=None, ge=1)
    frozen: int = Field(default=0, ge=0)
    arrows: List[List[int]] = Field(default_factory=list)
    matrix: Optional[List[List[int]]] = None

    @field_validator("arrows")
    @classmethod
    def _arrow_shape(cls, arrows: List[List[int]]) -> List[List[int]]:
        for arrow in arrows:
            if len(arrow) not in (2, 3):
                raise ValueError(f"arrow {arrow} must be [source, target] or [source, target, multiplicity]")
        return arrows

    @model_validator(mode="after")
    def _one_encoding(self) -> "QuiverDocument":
        if self.matrix is None and self.n is None:
            raise ValueError("either 'n' or 'matrix' is required")
        if self.matrix is not None and (self.n is not None or self.arrows):
            raise ValueError("'matrix' excludes 'n' and 'arrows'")
        return self

    def to_quiver(self) -> Quiver:
        if self.matrix is not None:
            return arrow_view(IceQuiver(self.matrix))
        arrows = [tuple(a) if len(a) == 3 else (a[0], a[1], 1) for a in self.arrows]
        return Quiver(self.n, tuple(arrows), self.frozen)

    @classmethod
    def from_quiver(cls, quiver: Quiver) -> "QuiverDocument":
        return cls(n=quiver.n, frozen=quiver.frozen, arrows=[list(a) for a in quiver.arrows])


def _parse_matrix_text(text: str) -> Quiver:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    try:
        values = [[int(x) for x in row] for row in rows]
    except ValueError as exc:
        raise MalformedQuiver(f"matrix text holds a non-integer entry: {exc}") from None
    if not values or len({len(row) for row in values}) != 1:
        raise MalformedQuiver("matrix text must have rows of equal length")
    # rows are mutable vertices; columns list the mutable vertices, then the frozen ones
    return arrow_view(IceQuiver(values))


def load_quiver(path: str | Path) -> Quiver:
    """Read a quiver from a JSON document or from whitespace-separated matrix rows."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return QuiverDocument.model_validate(json.loads(text)).to_quiver()
    return _parse_matrix_text(text)


class ArcDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: str
    ends: Optional[List[int]] = None
    end: Optional[int] = None
    tag: str = PLAIN

    @model_validator(mode="after")
    def _fields_for_type(self) -> "ArcDocument":
        if self.type == "chord":
            if self.ends is None or len(self.ends) != 2:
                raise ValueError("a chord needs 'ends': [i, j]")
        elif self.type == "radius":
            if self.end is None:
                raise ValueError("a radius needs 'end'")
            if self.tag not in (PLAIN, NOTCHED):
                raise ValueError(f"tag must be {PLAIN!r} or {NOTCHED!r}")
        else:
            raise ValueError(f"unknown arc type {self.type!r}")
        return self

    def to_arc(self) -> TaggedArc:
        return arc_from_dict(self.model_dump(exclude_none=True))


class TriangulationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    boundary_points: int = Field(ge=2)
    arcs: List[ArcDocument]

    def to_triangulation(self) -> TaggedTriangulation:
        return TaggedTriangulation(self.boundary_points, tuple(a.to_arc() for a in self.arcs))


def load_triangulation(path: str | Path) -> TaggedTriangulation:
    text = Path(path).read_text(encoding="utf-8")
    return TriangulationDocument.model_validate(json.loads(text)).to_triangulation()


class VerdictDocument(BaseModel):
    valid: bool
    length: int
    trace: List[List[int]]
    reason: Optional[str] = None


class CertificateDocument(BaseModel):
    minimal_length: Optional[int]
    exhaustive: bool
    witness: Optional[List[int]]
    explored_depth: int
    nodes: int


class ClassificationDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    class_: str = Field(alias="class")
    n: int
    three_cycles: List[List[int]]
    decomposition: Dict[str, Any]
    length: Optional[int] = None
    breakdown: Optional[Dict[str, int]] = None


__all__ = [
    "ArcDocument",
    "CertificateDocument",
    "ClassificationDocument",
    "QuiverDocument",
    "TriangulationDocument",
    "ValidationError",
    "VerdictDocument",
    "load_quiver",
    "load_triangulation",
]
