"""Structural recognition of mutation classes and their minimal-length formulas.

Recognition is pattern matching on the quiver itself: type A by its block structure, the four
Type D families and affine type A by their defining decompositions. Only the affine parameters
need a mutation search.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .constants import TAG_A, TAG_ACYCLIC, TAG_AFFINE, TAG_D_I, TAG_D_II, TAG_D_III, TAG_D_IV, TAG_UNKNOWN
from .exceptions import ResourceLimit, UnsupportedClass
from .quiver_core import Quiver, arrow_view, matrix_view, mutate
from .settings import settings

log = logging.getLogger("greenseq.classify")

Vertices = Tuple[int, ...]


@dataclass(frozen=True)
class ThreeCycleCensus:
    triples: Tuple[Tuple[int, int, int], ...] = ()

    @property
    def count(self) -> int:
        return len(self.triples)


def three_cycles(quiver: Quiver) -> ThreeCycleCensus:
    """Oriented 3-cycles with simple arrows among mutable vertices, each rotated to start at its minimum."""
    found = set()
    for x, y, m in quiver.arrows:
        if m != 1 or x > quiver.n or y > quiver.n:
            continue
        for z in quiver.successors(y):
            if z <= quiver.n and quiver.multiplicity(y, z) == 1 and quiver.multiplicity(z, x) == 1:
                cycle = (x, y, z)
                start = cycle.index(min(cycle))
                found.add(cycle[start:] + cycle[:start])
    return ThreeCycleCensus(tuple(sorted(found)))


def _census_on(quiver: Quiver, vertices: Iterable[int]) -> int:
    keep = set(vertices)
    return sum(1 for triple in three_cycles(quiver).triples if keep.issuperset(triple))


def is_type_A(quiver: Quiver) -> bool:
    """Mutation type A test on a connected quiver.

    Every cycle of the underlying graph is an oriented 3-cycle, degrees are at most 4, a degree-4
    vertex lies on two 3-cycles and a degree-3 vertex on exactly one.
    """
    if quiver.n == 0 or not quiver.is_connected():
        return False
    if any(m != 1 for _, _, m in quiver.arrows):
        return False
    oriented = {frozenset(t) for t in three_cycles(quiver).triples}
    triangles_at: Dict[int, int] = {v: 0 for v in quiver.vertices}
    for block in nx.biconnected_components(quiver.underlying_graph()):
        if len(block) == 2:
            continue
        if len(block) != 3 or frozenset(block) not in oriented:
            return False
        for v in block:
            triangles_at[v] += 1
    for v in quiver.vertices:
        degree = quiver.degree(v)
        if degree > 4:
            return False
        if degree == 4 and triangles_at[v] != 2:
            return False
        if degree == 3 and triangles_at[v] != 1:
            return False
    return True


def is_connecting(quiver: Quiver, v: int) -> bool:
    """Degree at most 2, and on a 3-cycle when the degree is exactly 2."""
    degree = quiver.degree(v)
    if degree > 2:
        return False
    if degree == 2:
        return any(v in triple for triple in three_cycles(quiver).triples)
    return True


def _type_A_with_connecting(quiver: Quiver, vertices: Iterable[int], v: int) -> bool:
    sub, labels = quiver.full_subquiver(vertices)
    return is_type_A(sub) and is_connecting(sub, labels.index(v) + 1)


def _components(quiver: Quiver, removed: Iterable[int], cut: Iterable[Tuple[int, int]] = ()) -> List[Vertices]:
    graph = quiver.underlying_graph()
    graph.remove_nodes_from([v for v in graph if v > quiver.n])
    graph.remove_nodes_from(removed)
    graph.remove_edges_from([e for e in cut if graph.has_edge(*e)])
    return sorted((tuple(sorted(c)) for c in nx.connected_components(graph)), key=lambda c: c[0])


@dataclass(frozen=True)
class Classification:
    """Base of the classification results; subclasses carry their decomposition."""

    quiver: Quiver = field(repr=False, compare=False)
    tag: ClassVar[str] = TAG_UNKNOWN

    def decomposition(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        census = three_cycles(self.quiver)
        return {
            "class": self.tag,
            "n": self.quiver.n,
            "three_cycles": [list(t) for t in census.triples],
            "decomposition": self.decomposition(),
        }


@dataclass(frozen=True)
class Acyclic(Classification):
    tag: ClassVar[str] = TAG_ACYCLIC


@dataclass(frozen=True)
class TypeA(Classification):
    tag: ClassVar[str] = TAG_A


@dataclass(frozen=True)
class TypeD_I(Classification):
    a: int = 0
    b: int = 0
    c: int = 0
    rest: Vertices = ()

    tag: ClassVar[str] = TAG_D_I

    def decomposition(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "Q_prime": list(self.rest)}


@dataclass(frozen=True)
class TypeD_II(Classification):
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    part1: Vertices = ()
    part2: Vertices = ()

    tag: ClassVar[str] = TAG_D_II

    def decomposition(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "Q1": list(self.part1), "Q2": list(self.part2)}


@dataclass(frozen=True)
class TypeD_III(TypeD_II):
    tag: ClassVar[str] = TAG_D_III


@dataclass(frozen=True)
class TypeD_IV(Classification):
    """Central oriented cycle ``a_1 -> ... -> a_k -> a_1`` with optional ``b_i`` over ``a_i -> a_{i+1}``.

    ``b`` and ``parts`` are keyed by the 1-based cycle position ``i``; ``parts[i]`` is the
    component of the quiver minus the cycle that contains ``b_i``.
    """

    cycle: Vertices = ()
    b: Dict[int, int] = field(default_factory=dict)
    parts: Dict[int, Vertices] = field(default_factory=dict)

    tag: ClassVar[str] = TAG_D_IV

    @property
    def k(self) -> int:
        return len(self.cycle)

    def degree_four(self) -> List[int]:
        """Cycle vertices ``a_i`` with both ``b_{i-1}`` and ``b_i`` present."""
        k = self.k
        return [self.cycle[i - 1] for i in range(1, k + 1) if i in self.b and ((i - 2) % k + 1) in self.b]

    def decomposition(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "b": {str(i): v for i, v in sorted(self.b.items())},
            "parts": {str(i): list(p) for i, p in sorted(self.parts.items())},
        }


@dataclass(frozen=True)
class AffineA(Classification):
    """Affine type A: a unique non-oriented cycle with 3-cycles hung on some of its arrows.

    ``cycle`` lists the cycle vertices in traversal order (smallest vertex first, then its smaller
    cycle neighbour). Edge ``i`` joins ``cycle[i]`` and ``cycle[i + 1]`` (cyclically); ``arrows[i]``
    is its (source, target) and ``clockwise[i]`` says whether it points along the traversal.
    ``z[i]`` is the vertex over edge ``i`` if any, and ``parts`` maps each such vertex to its
    component of the quiver minus the cycle.
    """

    cycle: Vertices = ()
    arrows: Tuple[Tuple[int, int], ...] = ()
    clockwise: Tuple[bool, ...] = ()
    z: Tuple[Optional[int], ...] = ()
    parts: Dict[int, Vertices] = field(default_factory=dict)

    tag: ClassVar[str] = TAG_AFFINE

    @property
    def kronecker(self) -> bool:
        return len(self.cycle) == 2

    @property
    def three_cycle_count(self) -> int:
        """z-triangles plus the 3-cycles inside the hanging components."""
        return sum(1 for v in self.z if v is not None) + sum(
            _census_on(self.quiver, part) for part in self.parts.values()
        )

    def decomposition(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "arrows": [list(a) for a in self.arrows],
            "clockwise": list(self.clockwise),
            "z": list(self.z),
            "parts": {str(v): list(p) for v, p in sorted(self.parts.items())},
        }


@dataclass(frozen=True)
class Unknown(Classification):
    tag: ClassVar[str] = TAG_UNKNOWN


def _simple(quiver: Quiver) -> bool:
    return all(m == 1 for _, _, m in quiver.arrows)


def _match_type_I(quiver: Quiver) -> Optional[TypeD_I]:
    for c in quiver.vertices:
        leaves = [v for v in quiver.neighbours(c) if quiver.degree(v) == 1]
        for i, a in enumerate(leaves):
            for b in leaves[i + 1 :]:
                rest = tuple(v for v in quiver.vertices if v not in (a, b))
                if _type_A_with_connecting(quiver, rest, c):
                    return TypeD_I(quiver, a, b, c, rest)
    return None


def _match_type_II(quiver: Quiver) -> Optional[TypeD_II]:
    for c, d, _ in quiver.arrows:
        middles = [
            x
            for x in quiver.successors(d)
            if quiver.degree(x) == 2 and quiver.multiplicity(x, c) == 1
        ]
        for i, a in enumerate(middles):
            for b in middles[i + 1 :]:
                found = _split_pair(quiver, (a, b), c, d, cut=[(c, d)])
                if found is not None:
                    return TypeD_II(quiver, a, b, c, d, *found)
    return None


def _split_pair(
    quiver: Quiver, removed: Sequence[int], c: int, d: int, cut: Sequence[Tuple[int, int]] = ()
) -> Optional[Tuple[Vertices, Vertices]]:
    parts = _components(quiver, removed, cut)
    if len(parts) != 2:
        return None
    first = next((p for p in parts if c in p), None)
    second = next((p for p in parts if d in p), None)
    if first is None or second is None or first == second:
        return None
    if _type_A_with_connecting(quiver, first, c) and _type_A_with_connecting(quiver, second, d):
        return first, second
    return None


def _oriented_cycles(quiver: Quiver, length: Optional[int] = None) -> List[Vertices]:
    """Chordless cycles of the underlying graph that are oriented, each following its arrows from its minimum."""
    graph = quiver.underlying_graph()
    graph.remove_nodes_from([v for v in graph if v > quiver.n])
    cycles = []
    for raw in nx.chordless_cycles(graph, length_bound=length):
        if len(raw) < 3 or (length is not None and len(raw) != length):
            continue
        start = raw.index(min(raw))
        ordered = raw[start:] + raw[:start]
        if quiver.b(ordered[0], ordered[1]) < 0:
            ordered = [ordered[0]] + list(reversed(ordered[1:]))
        k = len(ordered)
        if all(quiver.multiplicity(ordered[i], ordered[(i + 1) % k]) == 1 for i in range(k)):
            cycles.append(tuple(ordered))
    return sorted(cycles, key=lambda c: (len(c), c))


def _match_type_III(quiver: Quiver) -> Optional[TypeD_III]:
    for cycle in _oriented_cycles(quiver, 4):
        for shift in range(2):
            a, c, b, d = cycle[shift:] + cycle[:shift]
            if quiver.degree(a) != 2 or quiver.degree(b) != 2:
                continue
            found = _split_pair(quiver, (a, b), c, d)
            if found is not None:
                return TypeD_III(quiver, a, b, c, d, *found)
    return None


def _match_type_IV(quiver: Quiver) -> Optional[TypeD_IV]:
    for cycle in _oriented_cycles(quiver):
        found = _type_IV_data(quiver, cycle)
        if found is not None:
            return found
    return None


def _type_IV_data(quiver: Quiver, cycle: Vertices) -> Optional[TypeD_IV]:
    k = len(cycle)
    on_cycle = set(cycle)
    position = {v: i for i, v in enumerate(cycle, start=1)}
    b: Dict[int, int] = {}
    for v in quiver.vertices:
        if v in on_cycle:
            continue
        touching = [u for u in quiver.neighbours(v) if u in on_cycle]
        if not touching:
            continue
        if len(touching) != 2:
            return None
        # v -> a_i and a_{i+1} -> v
        heads = [u for u in touching if quiver.multiplicity(v, u) == 1]
        tails = [u for u in touching if quiver.multiplicity(u, v) == 1]
        if len(heads) != 1 or len(tails) != 1:
            return None
        i = position[heads[0]]
        if cycle[i % k] != tails[0] or i in b:
            return None
        b[i] = v
    parts: Dict[int, Vertices] = {}
    for part in _components(quiver, cycle):
        owners = [i for i, v in b.items() if v in part]
        if len(owners) != 1:
            return None
        i = owners[0]
        if not _type_A_with_connecting(quiver, part, b[i]):
            return None
        parts[i] = part
    return TypeD_IV(quiver, cycle, dict(sorted(b.items())), dict(sorted(parts.items())))


def _non_oriented_cycles(quiver: Quiver) -> List[Vertices]:
    graph = quiver.underlying_graph()
    cycles: List[Vertices] = []
    for raw in nx.chordless_cycles(graph):
        if len(raw) < 3:
            continue
        k = len(raw)
        forward = all(quiver.b(raw[i], raw[(i + 1) % k]) > 0 for i in range(k))
        backward = all(quiver.b(raw[i], raw[(i + 1) % k]) < 0 for i in range(k))
        if not (forward or backward):
            cycles.append(tuple(raw))
    for s, t, m in quiver.arrows:
        if m == 2:
            cycles.append((s, t))
    return cycles


def _traverse(quiver: Quiver, vertices: Iterable[int]) -> Tuple[Vertices, Tuple[Tuple[int, int], ...], Tuple[bool, ...]]:
    """Walk a cycle from its smallest vertex towards the smaller of its two cycle neighbours."""
    members = set(vertices)
    start = min(members)
    if len(members) == 2:
        other = max(members)
        source, target = (start, other) if quiver.b(start, other) > 0 else (other, start)
        order = (start, other)
        arrows = ((source, target), (source, target))
        return order, arrows, (source == start, source == other)
    order = [start]
    previous = None
    current = start
    while True:
        nxt = min(u for u in quiver.neighbours(current) if u in members and u != previous)
        if nxt == start:
            break
        order.append(nxt)
        previous, current = current, nxt
    k = len(order)
    arrows = []
    clockwise = []
    for i in range(k):
        u, v = order[i], order[(i + 1) % k]
        forward = quiver.b(u, v) > 0
        arrows.append((u, v) if forward else (v, u))
        clockwise.append(forward)
    return tuple(order), tuple(arrows), tuple(clockwise)


def _match_affine(quiver: Quiver) -> Optional[AffineA]:
    if any(m > 2 for _, _, m in quiver.arrows):
        return None
    doubles = [(s, t) for s, t, m in quiver.arrows if m == 2]
    if len(doubles) > 1:
        return None
    candidates = _non_oriented_cycles(quiver)
    if len(candidates) != 1:
        return None
    eta = candidates[0]
    if doubles and set(doubles[0]) != set(eta):
        return None
    order, arrows, clockwise = _traverse(quiver, eta)
    on_cycle = set(order)

    z: List[Optional[int]] = [None] * len(arrows)
    for v in quiver.vertices:
        if v in on_cycle:
            continue
        touching = [u for u in quiver.neighbours(v) if u in on_cycle]
        if not touching:
            continue
        if len(touching) != 2 or quiver.degree(v) < 2:
            return None
        slots = [
            i
            for i, (s, t) in enumerate(arrows)
            if quiver.multiplicity(v, s) == 1 and quiver.multiplicity(t, v) == 1 and {s, t} == set(touching)
        ]
        free = [i for i in slots if z[i] is None]
        if not free:
            return None
        z[free[0]] = v

    parts: Dict[int, Vertices] = {}
    placed = {v for v in z if v is not None}
    for part in _components(quiver, order):
        owners = [v for v in part if v in placed]
        if len(owners) != 1 or not _type_A_with_connecting(quiver, part, owners[0]):
            return None
        parts[owners[0]] = part
    return AffineA(quiver, order, arrows, clockwise, tuple(z), dict(sorted(parts.items())))


def classify(quiver: Quiver) -> Classification:
    """First matching class in the order Acyclic, A, D (I to IV), affine A, else Unknown."""
    q = quiver.without_frozen()
    if q.n == 0:
        return Unknown(q)
    if q.is_acyclic():
        return Acyclic(q)
    if not q.is_connected():
        return Unknown(q)
    if is_type_A(q):
        return TypeA(q)
    if _simple(q):
        for matcher in (_match_type_I, _match_type_II, _match_type_III, _match_type_IV):
            found = matcher(q)
            if found is not None:
                log.debug("classified", extra={"class": found.tag, "n": q.n})
                return found
    found = _match_affine(q)
    if found is not None:
        return found
    return Unknown(q)


def affine_parameters(quiver: Quiver, max_depth: Optional[int] = None, node_limit: Optional[int] = None) -> Tuple[int, int]:
    """``(n1, n2)`` with ``n1 >= n2`` read off an acyclic member of the mutation class.

    The class is explored breadth first up to ``max_depth`` mutations; an acyclic member of an
    affine type A class is its non-oriented cycle, whose arrows are counted along and against
    the traversal.
    """
    depth_bound = max_depth if max_depth is not None else settings.affine_search_depth
    limit = node_limit if node_limit is not None else settings.search_node_limit
    start = matrix_view(quiver.without_frozen())
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        matrix, depth = queue.popleft()
        candidate = arrow_view(matrix)
        if candidate.is_acyclic():
            found = _non_oriented_cycles(candidate)
            if len(found) != 1 or len(set(found[0])) != candidate.n:
                raise UnsupportedClass("acyclic member is not a single non-oriented cycle", tag=TAG_AFFINE)
            _, _, clockwise = _traverse(candidate, found[0])
            along = sum(clockwise)
            against = len(clockwise) - along
            log.debug("affine parameters", extra={"depth": depth, "along": along, "against": against})
            return max(along, against), min(along, against)
        if depth >= depth_bound:
            continue
        for k in range(1, matrix.n + 1):
            child = mutate(matrix, k)
            if child not in seen:
                seen.add(child)
                if len(seen) > limit:
                    raise ResourceLimit("no acyclic member within the node budget", limit=limit, explored=len(seen))
                queue.append((child, depth + 1))
    raise ResourceLimit(
        f"no acyclic member within {depth_bound} mutations", limit=depth_bound, explored=len(seen)
    )


def _resolve(quiver: Quiver, classification: Optional[Classification]) -> Classification:
    return classification if classification is not None else classify(quiver)


def formula_breakdown(quiver: Quiver, classification: Optional[Classification] = None) -> Dict[str, int]:
    """Nonzero terms of the minimal-length formula; ``n`` always present.

    The class-specific constants (+1 for D_II, +2 for D_III, -2 for D_IV) are implied by the tag.
    """
    found = _resolve(quiver, classification)
    q = found.quiver
    terms: Dict[str, int]
    if isinstance(found, Acyclic):
        terms = {"n": q.n}
    elif isinstance(found, (TypeA, TypeD_I, TypeD_III)):
        terms = {"n": q.n, "three_cycles": three_cycles(q).count}
    elif isinstance(found, TypeD_II):
        terms = {"n": q.n, "three_cycles": _census_on(q, found.part1) + _census_on(q, found.part2)}
    elif isinstance(found, TypeD_IV):
        terms = {
            "n": q.n,
            "three_cycles": sum(_census_on(q, p) for p in found.parts.values()),
            "deg4": len(found.degree_four()),
            "k": found.k,
        }
    elif isinstance(found, AffineA):
        terms = {"n": q.n, "three_cycles": found.three_cycle_count}
    else:
        raise UnsupportedClass("no minimal-length formula for this quiver", tag=found.tag)
    return {name: value for name, value in terms.items() if value or name == "n"}


_CONSTANT = {TAG_D_II: 1, TAG_D_III: 2, TAG_D_IV: -2}


def min_length(quiver: Quiver, classification: Optional[Classification] = None) -> int:
    found = _resolve(quiver, classification)
    terms = formula_breakdown(found.quiver, found)
    return sum(terms.values()) + _CONSTANT.get(found.tag, 0)


@dataclass(frozen=True)
class BranchDecomposition:
    """A core plus type A branches, each meeting the core in exactly one vertex."""

    core: Vertices
    branches: Tuple[Tuple[Vertices, int], ...] = ()

    def length(self, quiver: Quiver, core_length: int) -> int:
        """Core length plus each branch's type A minimum, minus one per shared vertex."""
        total = core_length
        for part, _ in self.branches:
            total += len(part) + _census_on(quiver, part) - 1
        return total


def branch_decomposition(quiver: Quiver, classification: Optional[Classification] = None) -> BranchDecomposition:
    """Split off the type A branches.

    Type D and affine quivers use their defining decomposition. Other quivers are pruned:
    leaves and pendant 3-cycle pairs are peeled off repeatedly, the larger vertices first.
    """
    found = _resolve(quiver, classification)
    q = found.quiver
    if isinstance(found, TypeD_I):
        return BranchDecomposition((found.a, found.b, found.c), ((found.rest, found.c),))
    if isinstance(found, TypeD_II):
        core = tuple(sorted((found.a, found.b, found.c, found.d)))
        return BranchDecomposition(core, ((found.part1, found.c), (found.part2, found.d)))
    if isinstance(found, TypeD_IV):
        core = tuple(sorted(set(found.cycle) | set(found.b.values())))
        return BranchDecomposition(core, tuple((found.parts[i], found.b[i]) for i in sorted(found.parts)))
    if isinstance(found, AffineA):
        core = tuple(sorted(set(found.cycle) | {v for v in found.z if v is not None}))
        return BranchDecomposition(core, tuple((found.parts[v], v) for v in sorted(found.parts)))
    return _prune(q)


def _prune(quiver: Quiver) -> BranchDecomposition:
    core = set(quiver.vertices)
    owner: Dict[int, int] = {}
    triangles = three_cycles(quiver).triples

    def inside(v: int) -> List[int]:
        return [u for u in quiver.neighbours(v) if u in core]

    def inner_degree(v: int) -> int:
        return sum(abs(quiver.b(v, u)) for u in inside(v))

    changed = True
    while changed:
        changed = False
        for v in sorted(core, reverse=True):
            if len(core) == 1:
                break
            if v not in core:
                continue
            if inner_degree(v) == 1:
                core.discard(v)
                (owner[v],) = [u for u in quiver.neighbours(v) if u in core]
                changed = True
                continue
            for triple in triangles:
                if v not in triple or not core.issuperset(triple):
                    continue
                pendant = [u for u in triple if inner_degree(u) == 2]
                if len(pendant) == 3:
                    x = min(triple)
                elif len(pendant) == 2:
                    (x,) = [u for u in triple if u not in pendant]
                else:
                    continue
                if v == x:
                    continue
                for u in triple:
                    if u != x:
                        core.discard(u)
                        owner[u] = x
                changed = True
                break

    branches: Dict[int, set] = {}
    for v in owner:
        root = v
        while root in owner:
            root = owner[root]
        branches.setdefault(root, {root}).add(v)
    return BranchDecomposition(
        tuple(sorted(core)), tuple((tuple(sorted(part)), x) for x, part in sorted(branches.items()))
    )
