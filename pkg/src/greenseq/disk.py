"""Tagged triangulations of a once-punctured disk and the Type IV construction.

Boundary marked points are ``0..b-1`` in clockwise order; ``p`` is the puncture. A chord
``Chord(i, j)`` is the arc whose side without the puncture contains the points ``i+1..j-1``
(clockwise from ``i``). A radius joins a boundary point to ``p`` and carries the tag of its end
at ``p``. Arc ``arcs[v - 1]`` of a triangulation is vertex ``v`` of its signed adjacency quiver;
a flip replaces the arc in place, so vertex identities survive flips.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .classify import TypeD_IV
from .constants import NOTCHED, PLAIN, STAGES_TYPE_IV
from .exceptions import (
    ArcNotInTriangulation,
    ConstructionInvariantViolated,
    MalformedTriangulation,
    NotComplete,
    NotTypeIVCore,
)
from .green_seq import GreenSequence
from .quiver_core import IceQuiver, Quiver, Seed, arrow_view

log = logging.getLogger("greenseq.disk")

PUNCTURE = "p"
MarkedPoint = Union[int, str]


@dataclass(frozen=True, order=True)
class Chord:
    i: int
    j: int

    def to_dict(self) -> dict:
        return {"type": "chord", "ends": [self.i, self.j]}


@dataclass(frozen=True, order=True)
class Radius:
    r: int
    tag: str = PLAIN

    def to_dict(self) -> dict:
        return {"type": "radius", "end": self.r, "tag": self.tag}


TaggedArc = Union[Chord, Radius]


def _toggle(tag: str) -> str:
    return NOTCHED if tag == PLAIN else PLAIN


def arc_key(arc: TaggedArc) -> Tuple[int, int, int]:
    """Sort key: chords by ends, then radii by boundary point (plain before notched)."""
    if isinstance(arc, Chord):
        return (0, arc.i, arc.j)
    return (1, arc.r, 0 if arc.tag == PLAIN else 1)


def _span(arc: Chord, b: int) -> int:
    return (arc.j - arc.i) % b


def _region(arc: Chord, b: int) -> Set[int]:
    """Boundary points on the side without the puncture, ends included."""
    return {(arc.i + d) % b for d in range(_span(arc, b) + 1)}


def _interior(arc: Chord, b: int) -> Set[int]:
    return {(arc.i + d) % b for d in range(1, _span(arc, b))}


def compatible(first: TaggedArc, second: TaggedArc, b: int) -> bool:
    if isinstance(first, Radius) and isinstance(second, Radius):
        if first.r == second.r:
            return first.tag != second.tag
        return first.tag == second.tag
    if isinstance(first, Radius):
        first, second = second, first
    if isinstance(second, Radius):
        return second.r not in _interior(first, b)
    a, c = _region(first, b), _region(second, b)
    if a <= c or c <= a:
        return True
    return not (_interior(first, b) & c) and not (_interior(second, b) & a)


@dataclass(frozen=True)
class Triangle:
    """Ideal triangle: sides listed clockwise as vertex numbers, ``None`` for boundary segments.

    In the pair case the loop around the puncture is listed as the notched radius of the pair.
    """

    sides: Tuple[Optional[int], Optional[int], Optional[int]]
    self_folded: bool = False


@dataclass(frozen=True)
class _Sector:
    start: int
    length: int
    base: Optional[int]
    polygon: Tuple[Tuple[int, int, int, Tuple[Optional[int], Optional[int], Optional[int]]], ...]


@dataclass(frozen=True)
class TaggedTriangulation:
    boundary_points: int
    arcs: Tuple[TaggedArc, ...]

    def __post_init__(self) -> None:
        b = self.boundary_points
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if b < 2:
            raise MalformedTriangulation("the disk needs at least two boundary points", boundary_points=b)
        if len(self.arcs) != b:
            raise MalformedTriangulation(f"expected {b} arcs, got {len(self.arcs)}", boundary_points=b)
        if len(set(self.arcs)) != b:
            raise MalformedTriangulation("repeated arc")
        for arc in self.arcs:
            if isinstance(arc, Chord):
                if not (0 <= arc.i < b and 0 <= arc.j < b) or not 2 <= _span(arc, b) <= b - 1:
                    raise MalformedTriangulation(f"{arc} is not an arc of the punctured {b}-gon")
            elif isinstance(arc, Radius):
                if not 0 <= arc.r < b or arc.tag not in (PLAIN, NOTCHED):
                    raise MalformedTriangulation(f"{arc} is not an arc of the punctured {b}-gon")
            else:
                raise MalformedTriangulation(f"unknown arc {arc!r}")
        for first, second in combinations(self.arcs, 2):
            if not compatible(first, second, b):
                raise MalformedTriangulation(f"{first} and {second} are not compatible")
        if not any(isinstance(arc, Radius) for arc in self.arcs):
            raise MalformedTriangulation("no arc reaches the puncture")
        # forces the sector layout, which rejects incomplete arc sets
        self._sectors

    @property
    def n(self) -> int:
        return len(self.arcs)

    def vertex(self, arc: TaggedArc) -> int:
        try:
            return self.arcs.index(arc) + 1
        except ValueError:
            raise ArcNotInTriangulation(f"{arc} is not in the triangulation", arc=repr(arc)) from None

    def __contains__(self, arc: object) -> bool:
        return arc in self.arcs

    @cached_property
    def _radii(self) -> List[Tuple[Radius, int]]:
        found = [(arc, v) for v, arc in enumerate(self.arcs, start=1) if isinstance(arc, Radius)]
        return sorted(found, key=lambda item: arc_key(item[0]))

    @cached_property
    def _points(self) -> List[int]:
        return sorted({arc.r for arc, _ in self._radii})

    @property
    def is_pair(self) -> bool:
        """Both radii sit at one boundary point (a self-folded triangle in the ideal picture)."""
        return len(self._points) == 1

    @cached_property
    def _chords(self) -> Dict[Chord, int]:
        return {arc: v for v, arc in enumerate(self.arcs, start=1) if isinstance(arc, Chord)}

    def _side(self, start: int, lo: int, hi: int) -> Optional[int]:
        if hi - lo == 1:
            return None
        b = self.boundary_points
        return self._chords.get(Chord((start + lo) % b, (start + hi) % b), -1)

    def _split(self, start: int, lo: int, hi: int, top: Optional[int], out: list) -> None:
        if hi - lo < 2:
            return
        for m in range(lo + 1, hi):
            left, right = self._side(start, lo, m), self._side(start, m, hi)
            if left != -1 and right != -1:
                out.append((lo, m, hi, (left, right, top)))
                self._split(start, lo, m, left, out)
                self._split(start, m, hi, right, out)
                return
        raise MalformedTriangulation("a polygon piece is not triangulated", start=start, lo=lo, hi=hi)

    @cached_property
    def _sectors(self) -> List[_Sector]:
        b = self.boundary_points
        points = self._points
        sectors = []
        if self.is_pair:
            (r,) = points
            loop = next(v for arc, v in self._radii if arc.tag == NOTCHED)
            polygon: list = []
            self._split(r, 0, b, loop, polygon)
            return [_Sector(r, b, loop, tuple(polygon))]
        for a, start in enumerate(points):
            end = points[(a + 1) % len(points)]
            length = (end - start) % b or b
            base = self._side(start, 0, length)
            if base == -1:
                raise MalformedTriangulation("missing base chord between consecutive radii", start=start, end=end)
            polygon = []
            self._split(start, 0, length, base, polygon)
            sectors.append(_Sector(start, length, base, tuple(polygon)))
        return sectors

    def radius_at(self, point: int) -> List[int]:
        return [v for arc, v in self._radii if arc.r == point]

    @cached_property
    def triangles(self) -> Tuple[Triangle, ...]:
        found: List[Triangle] = []
        if self.is_pair:
            (sector,) = self._sectors
            inner = next(v for arc, v in self._radii if arc.tag == PLAIN)
            found.append(Triangle((sector.base, inner, sector.base), self_folded=True))
        else:
            points = self._points
            for a, sector in enumerate(self._sectors):
                (left,) = self.radius_at(points[a])
                (right,) = self.radius_at(points[(a + 1) % len(points)])
                found.append(Triangle((sector.base, right, left)))
        for sector in self._sectors:
            found.extend(Triangle(sides) for _, _, _, sides in sector.polygon)
        return tuple(found)

    def sort_key(self) -> Tuple:
        return tuple(sorted(arc_key(a) for a in self.arcs))

    def same_arcs(self, other: "TaggedTriangulation") -> bool:
        return self.boundary_points == other.boundary_points and set(self.arcs) == set(other.arcs)

    def to_dict(self) -> dict:
        return {"boundary_points": self.boundary_points, "arcs": [arc.to_dict() for arc in self.arcs]}


def ideal_triangles(triangulation: TaggedTriangulation) -> Tuple[Triangle, ...]:
    return triangulation.triangles


def adjacency_quiver(triangulation: TaggedTriangulation) -> Quiver:
    """Signed adjacency quiver: clockwise neighbours in each ideal triangle, 2-cycles cancelled.

    Arrows in a triangle listed ``(s0, s1, s2)`` go ``s1 -> s0``, ``s2 -> s1`` and ``s0 -> s2``.
    The radius inside a self-folded triangle takes the arrows of the loop around it.
    """
    n = triangulation.n
    b = np.zeros((n, n), dtype=np.int64)
    for triangle in triangulation.triangles:
        if triangle.self_folded:
            continue
        s0, s1, s2 = triangle.sides
        for source, target in ((s1, s0), (s2, s1), (s0, s2)):
            if source is not None and target is not None:
                b[source - 1, target - 1] += 1
                b[target - 1, source - 1] -= 1
    if triangulation.is_pair:
        folded = next(t for t in triangulation.triangles if t.self_folded)
        loop, inner = folded.sides[0], folded.sides[1]
        b[inner - 1, :] = b[loop - 1, :]
        b[:, inner - 1] = b[:, loop - 1]
        b[inner - 1, loop - 1] = b[loop - 1, inner - 1] = 0
    return arrow_view(IceQuiver(b))


def _replace(triangulation: TaggedTriangulation, vertex: int, arc: TaggedArc) -> TaggedTriangulation:
    arcs = list(triangulation.arcs)
    arcs[vertex - 1] = arc
    return TaggedTriangulation(triangulation.boundary_points, tuple(arcs))


def _flipped_arc(triangulation: TaggedTriangulation, vertex: int) -> TaggedArc:
    t = triangulation
    b = t.boundary_points
    arc = t.arcs[vertex - 1]
    if isinstance(arc, Radius):
        points = t._points
        if t.is_pair:
            (sector,) = t._sectors
            apex = next(m for lo, m, hi, _ in sector.polygon if (lo, hi) == (0, b))
            return Radius((sector.start + apex) % b, _toggle(arc.tag))
        if len(points) == 2:
            other = points[1] if points[0] == arc.r else points[0]
            return Radius(other, _toggle(arc.tag))
        index = points.index(arc.r)
        return Chord(points[index - 1], points[(index + 1) % len(points)])

    for sector in t._sectors:
        below = next(((lo, m, hi) for lo, m, hi, sides in sector.polygon if sides[2] == vertex), None)
        if below is None:
            continue
        lo, m1, hi = below
        above = None
        for lo2, m2, hi2, sides in sector.polygon:
            if sides[0] == vertex:
                above = hi2
            elif sides[1] == vertex:
                above = lo2
        if above is None:
            tag = t.arcs[t.radius_at(sector.start)[0] - 1].tag
            return Radius((sector.start + m1) % b, tag)
        low, high = sorted((m1, above))
        return Chord((sector.start + low) % b, (sector.start + high) % b)
    raise MalformedTriangulation(f"{arc} lies in no sector")


def flip(triangulation: TaggedTriangulation, arc: Union[TaggedArc, int]) -> Tuple[TaggedTriangulation, TaggedArc]:
    """Replace ``arc`` (or the arc of vertex ``arc``) by the other arc completing the triangulation."""
    if isinstance(arc, int):
        if not 1 <= arc <= triangulation.n:
            raise ArcNotInTriangulation(f"vertex {arc} is not an arc of the triangulation", vertex=arc)
        vertex = arc
    else:
        vertex = triangulation.vertex(arc)
    new = _flipped_arc(triangulation, vertex)
    return _replace(triangulation, vertex, new), new


def flip_sequence(triangulation: TaggedTriangulation, steps: Sequence[int]) -> TaggedTriangulation:
    for vertex in steps:
        triangulation, _ = flip(triangulation, vertex)
    return triangulation


def rho_arc(arc: TaggedArc, b: int) -> TaggedArc:
    """Advance boundary ends one point clockwise; toggle the tag at the puncture."""
    if isinstance(arc, Chord):
        return Chord((arc.i + 1) % b, (arc.j + 1) % b)
    return Radius((arc.r + 1) % b, _toggle(arc.tag))


def rho(triangulation: TaggedTriangulation) -> TaggedTriangulation:
    b = triangulation.boundary_points
    return TaggedTriangulation(b, tuple(rho_arc(arc, b) for arc in triangulation.arcs))


@dataclass(frozen=True)
class Fan:
    point: MarkedPoint
    arcs: Tuple[TaggedArc, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.arcs)


def _angle(arc: TaggedArc, point: int, b: int) -> Tuple[int, int]:
    """Position about a boundary point, from the segment to ``point + 1`` towards the one from ``point - 1``."""
    if isinstance(arc, Radius):
        return (b, 0 if arc.tag == PLAIN else 1)
    if arc.i == point:
        return (_span(arc, b), 0)
    return (2 * b - _span(arc, b), 0)


def _incident(triangulation: TaggedTriangulation, point: MarkedPoint) -> List[TaggedArc]:
    if point == PUNCTURE:
        return [arc for arc, _ in triangulation._radii]
    b = triangulation.boundary_points
    around = [
        arc
        for arc in triangulation.arcs
        if (isinstance(arc, Radius) and arc.r == point) or (isinstance(arc, Chord) and point in (arc.i, arc.j))
    ]
    return sorted(around, key=lambda arc: _angle(arc, point, b))


def fans(
    triangulation: TaggedTriangulation, point: MarkedPoint, among: Optional[Set[TaggedArc]] = None
) -> List[Fan]:
    """Maximal runs of arcs at ``point``, each immediately clockwise from the previous one.

    Only arcs in ``among`` (default: all) take part; an excluded arc breaks a run. About the
    puncture the order is cyclic and runs are listed by the boundary point of their first arc.
    """
    ordered = _incident(triangulation, point)
    keep = [among is None or arc in among for arc in ordered]
    if not ordered or not any(keep):
        return []
    if point == PUNCTURE:
        if all(keep):
            return [Fan(point, tuple(ordered))]
        start = next(i for i in range(len(ordered)) if not keep[i])
        ordered = ordered[start:] + ordered[:start]
        keep = keep[start:] + keep[:start]
    runs: List[List[TaggedArc]] = []
    current: List[TaggedArc] = []
    for arc, wanted in zip(ordered, keep, strict=True):
        if wanted:
            current.append(arc)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    result = [Fan(point, tuple(run)) for run in runs]
    if point == PUNCTURE:
        result.sort(key=lambda fan: arc_key(fan.arcs[0]))
    return result


def complete_fan(
    triangulation: TaggedTriangulation, point: MarkedPoint, among: Optional[Set[TaggedArc]] = None
) -> Fan:
    found = fans(triangulation, point, among)
    incident = [arc for arc in _incident(triangulation, point) if among is None or arc in among]
    if len(found) != 1 or len(found[0]) != len(incident):
        raise NotComplete(f"arcs about {point} split into {len(found)} fans", point=point, fans=len(found))
    return found[0]


def _positions(k: int, ears: Sequence[int]) -> List[int]:
    """Boundary points of the radii when ears sit over the given 1-based cycle positions."""
    points = [0]
    for i in range(1, k):
        points.append(points[-1] + (2 if i in ears else 1))
    return points


def type_iv_triangulation(k: int, ears: Sequence[int]) -> TaggedTriangulation:
    """Radii ``a_1..a_k`` (vertices ``1..k``) and an ear chord ``b_i`` for each listed position.

    The ear chords are vertices ``k+1..`` in increasing position order.
    """
    if k < 3:
        raise NotTypeIVCore("the central cycle needs at least three vertices", k=k)
    ears = sorted(set(ears))
    if any(not 1 <= i <= k for i in ears):
        raise NotTypeIVCore("ear positions must lie in 1..k", ears=ears)
    points = _positions(k, ears)
    b = k + len(ears)
    arcs: List[TaggedArc] = [Radius(r, PLAIN) for r in points]
    arcs += [Chord(points[i - 1], (points[i - 1] + 2) % b) for i in ears]
    return TaggedTriangulation(b, tuple(arcs))


def from_type_IV(found: TypeD_IV) -> TaggedTriangulation:
    """The triangulation whose adjacency quiver is the given Type IV core, arcs in vertex order."""
    q = found.quiver
    if found.k < 3:
        raise NotTypeIVCore("the central cycle needs at least three vertices", k=found.k)
    for i, part in found.parts.items():
        if tuple(part) != (found.b[i],):
            raise NotTypeIVCore("every hanging quiver must be empty or a single vertex", position=i)
    expected = set(found.cycle) | set(found.b.values())
    if expected != set(q.vertices):
        raise NotTypeIVCore("the quiver has vertices outside the cycle and its ears")
    points = _positions(found.k, list(found.b))
    b = q.n
    arcs: Dict[int, TaggedArc] = {}
    for i, v in enumerate(found.cycle, start=1):
        arcs[v] = Radius(points[i - 1], PLAIN)
    for i, v in found.b.items():
        arcs[v] = Chord(points[i - 1], (points[i - 1] + 2) % b)
    return TaggedTriangulation(b, tuple(arcs[v] for v in q.vertices))


def lower_bound_IV(triangulation: TaggedTriangulation) -> int:
    """``2k - 2 + t + m``: radii ``k``, chords ``t``, chords whose double rotation is again a chord of T."""
    b = triangulation.boundary_points
    radii = sum(1 for arc in triangulation.arcs if isinstance(arc, Radius))
    chords = [arc for arc in triangulation.arcs if isinstance(arc, Chord)]
    repeated = sum(1 for arc in chords if rho_arc(rho_arc(arc, b), b) in triangulation)
    return 2 * radii - 2 + len(chords) + repeated


def type_iv_cores(max_size: int) -> Iterator[TaggedTriangulation]:
    """Type IV cores with ``k + #ears <= max_size``, one per rotation class of the ear set."""
    for k in range(3, max_size + 1):
        seen: Set[Tuple[int, ...]] = set()
        for count in range(0, min(k, max_size - k) + 1):
            for ears in combinations(range(1, k + 1), count):
                rotations = {tuple(sorted((e - 1 + s) % k + 1 for e in ears)) for s in range(k)}
                canonical = min(rotations)
                if canonical in seen:
                    continue
                seen.add(canonical)
                yield type_iv_triangulation(k, canonical)


class _Lockstep:
    """A triangulation and the framed adjacency quiver mutated alongside it."""

    def __init__(self, triangulation: TaggedTriangulation) -> None:
        self.triangulation = triangulation
        self.seed = Seed.initial(adjacency_quiver(triangulation))
        self.steps: Dict[str, List[int]] = {stage: [] for stage in STAGES_TYPE_IV}

    def flip(self, vertex: int, stage: str) -> None:
        if not self.seed.is_green(vertex):
            raise ConstructionInvariantViolated(
                f"vertex {vertex} is red at stage {stage}",
                stage=stage,
                state=self.triangulation.to_dict(),
                vertex=vertex,
            )
        self.triangulation, _ = flip(self.triangulation, vertex)
        self.seed = self.seed.mutate(vertex)
        self.steps[stage].append(vertex)
        principal = arrow_view(IceQuiver(self.seed.quiver.principal))
        if principal != adjacency_quiver(self.triangulation):
            raise ConstructionInvariantViolated(
                "flip and mutation disagree", stage=stage, state=self.triangulation.to_dict(), vertex=vertex
            )

    def vertex(self, arc: TaggedArc) -> int:
        return self.triangulation.vertex(arc)


def _ears(triangulation: TaggedTriangulation) -> Tuple[List[int], List[bool]]:
    """Radius points in order and, per sector between consecutive radii, whether it is an ear."""
    b = triangulation.boundary_points
    points = triangulation._points
    flags = []
    for a, start in enumerate(points):
        end = points[(a + 1) % len(points)]
        flags.append((end - start) % b == 2 and Chord(start, end) in triangulation)
    return points, flags


def _ear_fans(triangulation: TaggedTriangulation) -> Optional[List[Fan]]:
    """The disjoint maximal family of complete fans F(i), or ``None`` when every sector has an ear
    and their number is odd."""
    points, flags = _ears(triangulation)
    k = len(points)
    if all(flags):
        if k % 2:
            return None
        chosen = list(range(0, k, 2))
    else:
        chosen = []
        start = next(i for i in range(k) if not flags[i])
        order = [(start + 1 + j) % k for j in range(k)]
        run: List[int] = []
        for i in order + [None]:
            if i is not None and flags[i]:
                run.append(i)
                continue
            if run:
                picks = run[::-2] if len(run) % 2 else run[-2::-2]
                chosen.extend(picks)
                run = []
    chosen = sorted(set(chosen), reverse=True)
    return [complete_fan(triangulation, points[(i + 1) % k]) for i in chosen]


def _stage_one(state: _Lockstep) -> int:
    fans_one = _ear_fans(state.triangulation)
    if fans_one is None:
        points, _ = _ears(state.triangulation)
        first = Chord(points[0], points[1])
        state.flip(state.vertex(first), "i1")
        fans_one = _ear_fans(state.triangulation)
    largest = 0
    for fan in fans_one:
        largest = max(largest, len(fan))
        for arc in fan.arcs:
            state.flip(state.vertex(arc), "i1")
    return largest


def _stage_two(state: _Lockstep, original: TaggedTriangulation) -> List[TaggedArc]:
    current = state.triangulation
    kept = set(original.arcs) & set(current.arcs)
    runs = fans(current, PUNCTURE, kept)
    firsts = [fan.arcs[0] for fan in runs]
    for fan in runs:
        for arc in fan.arcs:
            state.flip(state.vertex(arc), "i2")
    return firsts


def _stage_three(state: _Lockstep, after_one: TaggedTriangulation, firsts: List[TaggedArc]) -> None:
    current = state.triangulation
    first_vertices = {after_one.vertex(arc) for arc in firsts}
    chosen: Set[TaggedArc] = set()
    for triangle in after_one.triangles:
        if triangle.self_folded:
            continue
        sides = triangle.sides
        for j in range(3):
            gamma, alpha = sides[j], sides[(j + 1) % 3]
            if gamma not in first_vertices or alpha is None:
                continue
            arc = after_one.arcs[alpha - 1]
            if isinstance(arc, Chord) and arc in current:
                chosen.add(arc)
    for arc in sorted(chosen, key=arc_key):
        state.flip(state.vertex(arc), "i3")


def _stage_four(state: _Lockstep) -> None:
    current = state.triangulation
    plain = {arc for arc, _ in current._radii if arc.tag == PLAIN}
    runs = fans(current, PUNCTURE, plain)
    if not runs:
        return
    best = max(runs, key=lambda fan: (len(fan), [-x for x in arc_key(fan.arcs[0])]))
    for arc in best.arcs:
        state.flip(state.vertex(arc), "i4")


def _stage_five(state: _Lockstep, target: TaggedTriangulation) -> None:
    goal = set(target.arcs)
    for _ in range(state.triangulation.n + 1):
        current = state.triangulation
        notched = {v for arc, v in current._radii if arc.tag == NOTCHED}
        chosen: Set[TaggedArc] = set()
        for triangle in current.triangles:
            if triangle.self_folded:
                continue
            for j, side in enumerate(triangle.sides):
                others = [s for i, s in enumerate(triangle.sides) if i != j]
                if side is None or not all(s in notched for s in others):
                    continue
                arc = current.arcs[side - 1]
                if arc not in goal:
                    chosen.add(arc)
        if not chosen:
            return
        for arc in sorted(chosen, key=arc_key):
            state.flip(state.vertex(arc), "i5")
    raise ConstructionInvariantViolated("last stage does not terminate", stage="i5", state=state.triangulation.to_dict())


def type_IV_stages(triangulation: TaggedTriangulation) -> Dict[str, Tuple[int, ...]]:
    """The five stages of the Type IV construction as vertex sequences, checked step by step."""
    state = _Lockstep(triangulation)
    largest = _stage_one(state)
    after_one = state.triangulation
    firsts = _stage_two(state, triangulation)
    if largest == 3:
        _stage_three(state, after_one, firsts)
    _stage_four(state)
    target = rho(triangulation)
    _stage_five(state, target)
    if not state.seed.all_red:
        raise ConstructionInvariantViolated(
            "construction ends with green vertices", stage="i5", state=state.triangulation.to_dict()
        )
    if not state.triangulation.same_arcs(target):
        raise ConstructionInvariantViolated(
            "construction does not end at the rotated triangulation", stage="i5", state=state.triangulation.to_dict()
        )
    log.debug("type IV stages", extra={stage: list(steps) for stage, steps in state.steps.items()})
    return {stage: tuple(steps) for stage, steps in state.steps.items()}


def type_IV_mgs(triangulation: TaggedTriangulation) -> GreenSequence:
    stages = type_IV_stages(triangulation)
    return GreenSequence(tuple(v for stage in STAGES_TYPE_IV for v in stages[stage]))


def arc_from_dict(data: dict) -> TaggedArc:
    if data.get("type") == "chord":
        i, j = data["ends"]
        return Chord(int(i), int(j))
    if data.get("type") == "radius":
        return Radius(int(data["end"]), data.get("tag", PLAIN))
    raise MalformedTriangulation(f"unknown arc type {data.get('type')!r}")
