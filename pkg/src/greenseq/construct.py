"""Constructive minimal-length maximal green sequences.

Every public builder returns a sequence in the vertex labels of the quiver it was given;
:func:`min_mgs` certifies its output before returning it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .classify import (
    Acyclic,
    AffineA,
    Classification,
    TypeA,
    TypeD_I,
    TypeD_II,
    TypeD_III,
    TypeD_IV,
    classify,
    min_length,
    three_cycles,
)
from .exceptions import (
    BadIndex,
    ConstructionInvariantViolated,
    HypothesisViolated,
    NotABranchQuiver,
    PreconditionViolated,
    UnsupportedClass,
)
from .green_seq import GreenSequence, is_maximal_green, shortest_mgs
from .quiver_core import Quiver

log = logging.getLogger("greenseq.construct")

Vertices = Tuple[int, ...]


@dataclass(frozen=True)
class DirectSumSpec:
    """Two quivers with global vertex labels joined by arrows ``tails[i] -> heads[i]``.

    ``first_labels[j]`` is the global label of vertex ``j + 1`` of ``first`` (default ``1..n1``);
    ``second_labels`` likewise (default ``n1 + 1..n1 + n2``). Tails and heads are global labels.
    """

    first: Quiver
    second: Quiver
    tails: Tuple[int, ...] = ()
    heads: Tuple[int, ...] = ()
    first_labels: Optional[Vertices] = None
    second_labels: Optional[Vertices] = None

    def __post_init__(self) -> None:
        n1 = self.first.n
        if self.first_labels is None:
            object.__setattr__(self, "first_labels", tuple(range(1, n1 + 1)))
        if self.second_labels is None:
            object.__setattr__(self, "second_labels", tuple(range(n1 + 1, n1 + self.second.n + 1)))
        object.__setattr__(self, "tails", tuple(self.tails))
        object.__setattr__(self, "heads", tuple(self.heads))
        if len(self.first_labels) != n1 or len(self.second_labels) != self.second.n:
            raise BadIndex("label lists do not match the summand sizes")
        if set(self.first_labels) & set(self.second_labels):
            raise BadIndex("summands share vertex labels")
        if len(self.tails) != len(self.heads):
            raise BadIndex("tails and heads differ in length", tails=list(self.tails), heads=list(self.heads))
        for tail in self.tails:
            if tail not in self.first_labels:
                raise BadIndex(f"tail {tail} is not a vertex of the first summand", vertex=tail)
        for head in self.heads:
            if head not in self.second_labels:
                raise BadIndex(f"head {head} is not a vertex of the second summand", vertex=head)

    @property
    def labels(self) -> Vertices:
        """Global labels in increasing order; vertex ``i`` of the sum carries ``labels[i - 1]``."""
        return tuple(sorted(self.first_labels + self.second_labels))


def direct_sum(spec: DirectSumSpec) -> Quiver:
    """Disjoint union plus the connecting arrows, on vertices ``1..len(spec.labels)``."""
    index = {label: i for i, label in enumerate(spec.labels, start=1)}
    arrows = []
    for quiver, labels in ((spec.first, spec.first_labels), (spec.second, spec.second_labels)):
        arrows.extend((index[labels[s - 1]], index[labels[t - 1]], m) for s, t, m in quiver.arrows)
    arrows.extend((index[a], index[b], 1) for a, b in zip(spec.tails, spec.heads, strict=True))
    return Quiver(len(index), tuple(arrows))


def concat_mgs(spec: DirectSumSpec, first: GreenSequence, second: GreenSequence) -> GreenSequence:
    """Run an MGS of the first summand, then one of the second, on the direct sum."""
    pairs = list(zip(spec.tails, spec.heads, strict=True))
    repeated = sorted({p for p in pairs if pairs.count(p) > 1})
    if repeated:
        raise HypothesisViolated("parallel connecting arrows", pairs=[list(p) for p in repeated])
    index = {label: i for i, label in enumerate(spec.labels, start=1)}
    steps = [index[spec.first_labels[k - 1]] for k in first]
    steps += [index[spec.second_labels[k - 1]] for k in second]
    return GreenSequence(tuple(steps))


def direct_sum_min_length(spec: DirectSumSpec) -> int:
    """Minimal MGS length of the direct sum: the minimal lengths of its summands added."""
    return min_length(spec.first) + min_length(spec.second)


def topological_mgs(quiver: Quiver) -> GreenSequence:
    """Sources first, smallest label first among the available sources."""
    graph = quiver.without_frozen().to_networkx()
    return GreenSequence(tuple(nx.lexicographical_topological_sort(graph)))


def core_mgs_type_II(found: TypeD_II) -> GreenSequence:
    return GreenSequence((found.d, found.a, found.b, found.c, found.d))


def core_mgs_type_III(found: TypeD_III) -> GreenSequence:
    return GreenSequence((found.a, found.c, found.b, found.d, found.c, found.a))


def attach_branch_mgs(quiver: Quiver, core: Sequence[int], core_mgs: GreenSequence) -> GreenSequence:
    """Extend an MGS of the full subquiver on ``core`` to the whole quiver.

    Vertices are attached in breadth-first order from the core: a pendant vertex ``z`` hanging off
    ``x`` is appended when ``x -> z`` and prepended when ``z -> x``; a pendant 3-cycle
    ``x -> u -> w -> x`` turns the sequence ``s`` into ``(w, s, u, w)``.
    """
    current: List[int] = list(dict.fromkeys(core))
    placed = set(current)
    steps = list(core_mgs)
    triangles = three_cycles(quiver).triples

    def attached_to(v: int) -> List[int]:
        return [u for u in quiver.neighbours(v) if u in placed]

    progress = True
    while progress and len(placed) < quiver.n:
        progress = False
        position = 0
        while position < len(current):
            x = current[position]
            position += 1
            for z in quiver.neighbours(x):
                if z in placed or attached_to(z) != [x] or abs(quiver.b(x, z)) != 1:
                    continue
                partner = _pendant_partner(quiver, triangles, x, z, placed)
                if partner is not None:
                    u, w = partner
                    steps = [w] + steps + [u, w]
                    for v in sorted((u, w)):
                        placed.add(v)
                        current.append(v)
                elif any(x in t and z in t for t in triangles):
                    continue
                elif quiver.b(x, z) > 0:
                    steps.append(z)
                    placed.add(z)
                    current.append(z)
                else:
                    steps.insert(0, z)
                    placed.add(z)
                    current.append(z)
                progress = True
    if len(placed) < quiver.n:
        missing = sorted(set(quiver.vertices) - placed)
        raise NotABranchQuiver("vertices cannot be attached as type A branches", missing=missing)
    return GreenSequence(tuple(steps))


def _pendant_partner(
    quiver: Quiver, triangles: Sequence[Tuple[int, int, int]], x: int, z: int, placed: set
) -> Optional[Tuple[int, int]]:
    """For a 3-cycle ``x -> u -> w -> x`` through new vertices ``z`` and ``y``, return ``(u, w)``."""
    for triple in triangles:
        if x not in triple or z not in triple:
            continue
        (y,) = [v for v in triple if v not in (x, z)]
        if y in placed or [v for v in quiver.neighbours(y) if v in placed] != [x]:
            return None
        u = z if quiver.b(x, z) > 0 else y
        w = y if u == z else z
        return u, w
    return None


@dataclass(frozen=True)
class ArrowRun:
    """Consecutive arrows ``alpha_1, ..., alpha_d`` of the non-oriented cycle with their 3-cycle tips."""

    arrows: Tuple[Tuple[int, int], ...]
    z: Tuple[Optional[int], ...]

    @property
    def source(self) -> int:
        return self.arrows[0][0]

    @property
    def sink(self) -> int:
        return self.arrows[-1][1]

    @property
    def vertices(self) -> Vertices:
        """All vertices of the component: the path and its tips."""
        path = [s for s, _ in self.arrows] + [self.sink]
        return tuple(sorted(set(path) | {v for v in self.z if v is not None}))


@dataclass(frozen=True)
class AffineComponents:
    """Clockwise components ``R_i`` and counterclockwise ``S_i`` sharing the source of ``R_i``."""

    clockwise: Tuple[ArrowRun, ...]
    counterclockwise: Tuple[ArrowRun, ...]


def _normalized_cycle(found: AffineA) -> Tuple[Tuple[Tuple[int, int], ...], Tuple[bool, ...], Tuple[Optional[int], ...]]:
    """Traversal data with orientation flipped, if needed, so every clockwise arrow carries a tip."""
    arrows, clockwise, z = found.arrows, found.clockwise, found.z
    covered = all(z[i] is not None for i, cw in enumerate(clockwise) if cw)
    if covered:
        return arrows, clockwise, z
    if all(z[i] is not None for i, cw in enumerate(clockwise) if not cw):
        order = list(range(len(arrows)))[::-1]
        return (
            tuple(arrows[i] for i in order),
            tuple(not clockwise[i] for i in order),
            tuple(z[i] for i in order),
        )
    raise PreconditionViolated("a clockwise and a counterclockwise arrow both lack 3-cycles", clause="direct-sum")


def _runs(flags: Sequence[bool], want: bool) -> List[List[int]]:
    """Maximal cyclic runs of edge indices whose flag equals ``want``."""
    m = len(flags)
    starts = [i for i in range(m) if flags[i] == want and flags[i - 1] != want]
    runs = []
    for start in starts:
        run = [start]
        i = (start + 1) % m
        while flags[i] == want and i != start:
            run.append(i)
            i = (i + 1) % m
        runs.append(run)
    return runs


def affine_components(found: AffineA) -> AffineComponents:
    """Split a restricted affine core into clockwise and counterclockwise components.

    The core must be its non-oriented cycle plus single-vertex tips, with no arrow pair that
    would make it a direct sum of two type A quivers.
    """
    _require_affine(found)
    if found.kronecker:
        raise PreconditionViolated("the non-oriented cycle is a Kronecker quiver", clause="kronecker")
    if any(len(part) != 1 for part in found.parts.values()):
        raise PreconditionViolated("every hanging quiver must be empty or a single vertex", clause="branches")
    arrows, clockwise, z = _normalized_cycle(found)
    if all(clockwise) or not any(clockwise):
        raise PreconditionViolated("the cycle is oriented", clause="acyclic")

    by_source: Dict[int, Tuple[ArrowRun, ArrowRun]] = {}
    forward = {}
    for run in _runs(clockwise, True):
        r = ArrowRun(tuple(arrows[i] for i in run), tuple(z[i] for i in run))
        forward[r.source] = r
    for run in _runs(clockwise, False):
        ordered = run[::-1]
        s = ArrowRun(tuple(arrows[i] for i in ordered), tuple(z[i] for i in ordered))
        if s.source not in forward:
            raise PreconditionViolated("components do not pair up by source", clause="pairing")
        by_source[s.source] = (forward[s.source], s)
    if len(by_source) != len(forward):
        raise PreconditionViolated("components do not pair up by source", clause="pairing")
    pairs = [by_source[v] for v in sorted(by_source)]
    return AffineComponents(tuple(r for r, _ in pairs), tuple(s for _, s in pairs))


def _require_affine(found: Classification) -> None:
    if not isinstance(found, AffineA):
        raise PreconditionViolated(f"expected an affine type A classification, got {found.tag}", clause="class")


def _r_initial(run: ArrowRun) -> List[int]:
    steps = [run.z[0]]
    for (s, _), tip in zip(run.arrows[1:], run.z[1:], strict=True):
        steps += [tip, s]
    return steps


def _s_initial(run: ArrowRun) -> List[int]:
    return [s for s, _ in run.arrows] + [run.sink]


def _s_final(run: ArrowRun) -> List[int]:
    tips = sorted(v for v in run.z if v is not None)
    sources = sorted(s for (s, _), tip in zip(run.arrows[:-1], run.z[:-1], strict=True) if tip is not None)
    return tips + sources


def _r_final(run: ArrowRun, counter: Sequence[ArrowRun]) -> List[int]:
    steps = list(run.z)
    for other in counter:
        for (s, t), tip in zip(other.arrows, other.z, strict=True):
            if t == run.sink and tip is not None:
                steps.append(s)
    return steps


def affine_mgs(found: AffineA) -> GreenSequence:
    """Minimal MGS of a restricted affine core: all clockwise starts, all counterclockwise starts,
    all counterclockwise ends, then all clockwise ends."""
    parts = affine_components(found)
    steps: List[int] = []
    for run in parts.clockwise:
        steps += _r_initial(run)
    for run in parts.counterclockwise:
        steps += _s_initial(run)
    for run in parts.counterclockwise:
        steps += _s_final(run)
    for run in parts.clockwise:
        steps += _r_final(run, parts.counterclockwise)
    return GreenSequence(tuple(steps))


def split_affine_direct_sum(found: AffineA) -> Optional[DirectSumSpec]:
    """The type A direct sum decomposition through a tipless clockwise and counterclockwise arrow."""
    _require_affine(found)
    alpha = next((i for i, cw in enumerate(found.clockwise) if cw and found.z[i] is None), None)
    beta = next((i for i, cw in enumerate(found.clockwise) if not cw and found.z[i] is None), None)
    if alpha is None or beta is None or found.kronecker:
        return None
    q = found.quiver
    (sa, ta), (sb, tb) = found.arrows[alpha], found.arrows[beta]
    graph = q.underlying_graph()
    graph.remove_edges_from([(sa, ta), (sb, tb)])
    first = next(sorted(c) for c in nx.connected_components(graph) if sa in c)
    second = next(sorted(c) for c in nx.connected_components(graph) if ta in c)
    if sb not in first or tb not in second:
        raise PreconditionViolated("cut arrows do not separate sources from targets", clause="direct-sum")
    first_quiver, first_labels = q.full_subquiver(first)
    second_quiver, second_labels = q.full_subquiver(second)
    return DirectSumSpec(first_quiver, second_quiver, (sa, sb), (ta, tb), first_labels, second_labels)


def _type_A_mgs(quiver: Quiver) -> GreenSequence:
    start = min(quiver.vertices)
    return attach_branch_mgs(quiver, [start], GreenSequence((start,)))


def _sub_mgs(quiver: Quiver, vertices: Sequence[int], build) -> GreenSequence:
    sub, labels = quiver.full_subquiver(vertices)
    return build(sub).relabel(labels)


def _affine_dispatch(found: AffineA) -> GreenSequence:
    q = found.quiver
    spec = split_affine_direct_sum(found)
    if spec is not None:
        log.debug("affine direct sum", extra={"tails": list(spec.tails), "heads": list(spec.heads)})
        first = _type_A_mgs(spec.first)
        second = _type_A_mgs(spec.second)
        steps = concat_mgs(spec, first, second)
        return steps.relabel(spec.labels)

    core = sorted(set(found.cycle) | {v for v in found.z if v is not None})
    core_quiver, labels = q.full_subquiver(core)
    if found.kronecker:
        bound = len(core) + sum(1 for v in found.z if v is not None)
        certificate = shortest_mgs(core_quiver, bound)
        if certificate.witness is None:
            raise ConstructionInvariantViolated("no core sequence within the formula length", stage="kronecker")
        core_steps = certificate.witness.relabel(labels)
    else:
        position = {v: i for i, v in enumerate(labels, start=1)}
        restricted = AffineA(
            core_quiver,
            tuple(position[v] for v in found.cycle),
            tuple((position[s], position[t]) for s, t in found.arrows),
            found.clockwise,
            tuple(position[v] if v is not None else None for v in found.z),
            {position[v]: (position[v],) for v in found.parts},
        )
        core_steps = affine_mgs(restricted).relabel(labels)
    return attach_branch_mgs(q, core, core_steps)


def _type_IV_dispatch(found: TypeD_IV) -> GreenSequence:
    from .disk import from_type_IV, type_IV_mgs

    q = found.quiver
    core = sorted(set(found.cycle) | set(found.b.values()))
    core_quiver, labels = q.full_subquiver(core)
    position = {v: i for i, v in enumerate(labels, start=1)}
    restricted = TypeD_IV(
        core_quiver,
        tuple(position[v] for v in found.cycle),
        {i: position[v] for i, v in found.b.items()},
        {i: (position[v],) for i, v in found.b.items()},
    )
    core_steps = type_IV_mgs(from_type_IV(restricted)).relabel(labels)
    return attach_branch_mgs(q, core, core_steps)


def _dispatch(found: Classification) -> GreenSequence:
    q = found.quiver
    if isinstance(found, Acyclic):
        return topological_mgs(q)
    if isinstance(found, TypeA):
        return _type_A_mgs(q)
    if isinstance(found, TypeD_I):
        core = (found.a, found.b, found.c)
        return attach_branch_mgs(q, core, _sub_mgs(q, core, topological_mgs))
    if isinstance(found, TypeD_III):
        return attach_branch_mgs(q, (found.a, found.b, found.c, found.d), core_mgs_type_III(found))
    if isinstance(found, TypeD_II):
        return attach_branch_mgs(q, (found.a, found.b, found.c, found.d), core_mgs_type_II(found))
    if isinstance(found, TypeD_IV):
        return _type_IV_dispatch(found)
    if isinstance(found, AffineA):
        return _affine_dispatch(found)
    raise UnsupportedClass("no construction for this quiver", tag=found.tag)


def min_mgs(quiver: Quiver, classification: Optional[Classification] = None) -> Tuple[GreenSequence, int]:
    """A certified minimal-length MGS and its length."""
    found = classification if classification is not None else classify(quiver)
    steps = _dispatch(found)
    expected = min_length(found.quiver, found)
    verdict = is_maximal_green(found.quiver, steps)
    if not verdict:
        raise ConstructionInvariantViolated(
            f"constructed sequence is not maximal green: {verdict.reason}",
            stage=found.tag,
            state=list(steps.steps),
        )
    if len(steps) != expected:
        raise ConstructionInvariantViolated(
            f"constructed length {len(steps)} differs from the formula {expected}",
            stage=found.tag,
            state=list(steps.steps),
        )
    log.info("min_mgs", extra={"class": found.tag, "length": len(steps)})
    return steps, len(steps)
