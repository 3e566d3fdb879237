"""Maximal green sequences: verification, search, restriction and exchange graphs."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .exceptions import (
    ConstructionInvariantViolated,
    IndexOutOfRange,
    NotGreenAtStep,
    ReplayMismatch,
    ResourceLimit,
)
from .quiver_core import IceQuiver, Quiver, Seed, g_from_c
from .settings import settings

log = logging.getLogger("greenseq.green_seq")

QuiverLike = Union[Quiver, IceQuiver]
Steps = Union["GreenSequence", Sequence[int]]


@dataclass(frozen=True)
class GreenSequence:
    steps: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(int(k) for k in self.steps))

    @classmethod
    def parse(cls, text: str) -> "GreenSequence":
        """Parse a comma separated vertex list such as ``"1,2,1"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return cls(tuple(int(p) for p in parts))

    @property
    def length(self) -> int:
        return len(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __add__(self, other: "GreenSequence") -> "GreenSequence":
        return GreenSequence(self.steps + tuple(other))

    def relabel(self, labels: Sequence[int]) -> "GreenSequence":
        """Map step ``k`` to ``labels[k - 1]``."""
        return GreenSequence(tuple(labels[k - 1] for k in self.steps))


@dataclass(frozen=True)
class CVectorTrace:
    vectors: Tuple[Tuple[int, ...], ...] = ()

    def to_list(self) -> List[List[int]]:
        return [list(v) for v in self.vectors]


@dataclass(frozen=True)
class SearchCertificate:
    minimal_length: Optional[int]
    witness: Optional[GreenSequence]
    explored_depth: int
    exhaustive: bool
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "minimal_length": self.minimal_length,
            "exhaustive": self.exhaustive,
            "witness": list(self.witness.steps) if self.witness is not None else None,
            "explored_depth": self.explored_depth,
            "nodes": self.nodes,
        }


@dataclass(frozen=True)
class MGSVerdict:
    """Outcome of :func:`is_maximal_green`; truthy iff the sequence is a maximal green sequence."""

    valid: bool
    reason: Optional[str] = None
    trace: Optional[CVectorTrace] = None

    def __bool__(self) -> bool:
        return self.valid


def _steps(s: Steps) -> Tuple[int, ...]:
    return s.steps if isinstance(s, GreenSequence) else tuple(int(k) for k in s)


def _check_duality(seed: Seed, step: int) -> None:
    if not np.array_equal(g_from_c(seed.c), seed.g):
        raise ConstructionInvariantViolated(
            "g-matrix disagrees with the inverse transpose of the c-matrix",
            stage="duality",
            step=step,
            state=seed.g.tolist(),
        )


def apply_green_sequence(quiver: QuiverLike, s: Steps) -> Tuple[IceQuiver, CVectorTrace]:
    """Mutate ``framed(quiver)`` along ``s``, recording the c-vector of each mutated vertex."""
    seed = Seed.initial(quiver)
    vectors: List[Tuple[int, ...]] = []
    for step, k in enumerate(_steps(s), start=1):
        if not 1 <= k <= seed.n:
            raise IndexOutOfRange(f"step {step} names vertex {k}, outside 1..{seed.n}", step=step, vertex=k)
        if not seed.is_green(k):
            raise NotGreenAtStep(step, k)
        vectors.append(seed.c_vector(k))
        seed = seed.mutate(k)
        if settings.check_duality:
            _check_duality(seed, step)
    return seed.quiver, CVectorTrace(tuple(vectors))


def is_maximal_green(quiver: QuiverLike, s: Steps) -> MGSVerdict:
    try:
        final, trace = apply_green_sequence(quiver, s)
    except (NotGreenAtStep, IndexOutOfRange) as exc:
        return MGSVerdict(False, exc.message)
    c = final.matrix[:, final.n :]
    green = [i + 1 for i, row in enumerate(c) if (row >= 0).all()]
    if green:
        return MGSVerdict(False, f"vertices {green} are still green", trace)
    return MGSVerdict(True, None, trace)


def certify(quiver: QuiverLike, s: Steps) -> dict:
    """Verification report: validity, length, trace and the failure reason if any."""
    steps = _steps(s)
    verdict = is_maximal_green(quiver, steps)
    report = {"valid": verdict.valid, "length": len(steps)}
    if verdict.trace is not None:
        report["trace"] = verdict.trace.to_list()
    if verdict.reason:
        report["reason"] = verdict.reason
    return report


def _path(parents: Dict[bytes, Tuple[Optional[bytes], int]], key: bytes) -> GreenSequence:
    steps: List[int] = []
    while True:
        parent, k = parents[key]
        if parent is None:
            break
        steps.append(k)
        key = parent
    return GreenSequence(tuple(reversed(steps)))


def shortest_mgs(quiver: QuiverLike, depth_bound: int, node_limit: Optional[int] = None) -> SearchCertificate:
    """Breadth-first search for a minimal length maximal green sequence.

    Each layer is expanded in lexicographic order of the representative paths with moves in
    ascending order, so the witness is the lexicographically smallest minimal sequence among
    the representatives kept after deduplication by canonical key.
    """
    if depth_bound < 1:
        raise IndexOutOfRange("depth bound must be at least 1", depth=depth_bound)
    limit = node_limit if node_limit is not None else settings.search_node_limit
    start = Seed.initial(quiver)
    parents: Dict[bytes, Tuple[Optional[bytes], int]] = {start.key: (None, 0)}
    frontier: List[Seed] = [start]
    log.info("shortest_mgs start", extra={"n": start.n, "depth_bound": depth_bound, "node_limit": limit})

    for depth in range(1, depth_bound + 1):
        layer: List[Seed] = []
        for seed in frontier:
            for k in seed.green_vertices():
                child = seed.mutate(k)
                if child.key in parents:
                    continue
                parents[child.key] = (seed.key, k)
                if child.all_red:
                    witness = _path(parents, child.key)
                    log.info("shortest_mgs found", extra={"length": depth, "nodes": len(parents)})
                    return SearchCertificate(depth, witness, depth, True, len(parents))
                if len(parents) > limit:
                    raise ResourceLimit(
                        f"search visited more than {limit} seeds", limit=limit, explored=len(parents)
                    )
                layer.append(child)
        log.debug("shortest_mgs layer", extra={"depth": depth, "size": len(layer)})
        if not layer:
            log.info("shortest_mgs exhausted", extra={"depth": depth, "nodes": len(parents)})
            return SearchCertificate(None, None, depth, False, len(parents))
        frontier = layer

    log.info("shortest_mgs bound reached", extra={"depth": depth_bound, "nodes": len(parents)})
    return SearchCertificate(None, None, depth_bound, False, len(parents))


def restrict_mgs(quiver: Quiver, s: Steps, subset: Iterable[int]) -> GreenSequence:
    """Restrict an MGS of ``quiver`` to the full subquiver on ``subset``.

    The trace is filtered to c-vectors supported on ``subset`` and replayed on the framed
    subquiver. The result is labelled with the original vertex names.
    """
    vertices = sorted(set(subset))
    if not vertices:
        raise IndexOutOfRange("restriction needs a nonempty vertex set")
    final, trace = apply_green_sequence(quiver, s)
    if not (final.matrix[:, final.n :] <= 0).all():
        raise ReplayMismatch("sequence is not maximal", step=len(trace.vectors))
    sub, labels = quiver.full_subquiver(vertices)
    positions = [v - 1 for v in labels]
    outside = [i for i in range(quiver.n) if i + 1 not in set(labels)]
    targets = [
        tuple(vector[i] for i in positions)
        for vector in trace.vectors
        if all(vector[i] == 0 for i in outside)
    ]

    seed = Seed.initial(sub)
    steps: List[int] = []
    for step, target in enumerate(targets, start=1):
        match = next((k for k in seed.green_vertices() if seed.c_vector(k) == target), None)
        if match is None:
            raise ReplayMismatch(f"no green vertex carries c-vector {list(target)}", step=step)
        steps.append(match)
        seed = seed.mutate(match)
    if not seed.all_red:
        raise ReplayMismatch("replay did not end all red", step=len(targets))
    return GreenSequence(tuple(steps)).relabel(labels)


def enumerate_exchange_graph(
    quiver: QuiverLike,
    node_limit: Optional[int] = None,
    green_only: bool = False,
    depth: Optional[int] = None,
    strict: bool = False,
) -> nx.DiGraph:
    """Oriented exchange graph reachable from ``framed(quiver)``.

    Nodes are canonical keys in hex with attributes ``c`` (c-matrix of the first representative),
    ``depth`` and ``all_red``. Every edge points along a green mutation and carries the mutated
    ``vertex`` and its ``c_vector``. ``graph.graph["truncated"]`` is set when the node limit or
    the depth bound cut the exploration short; with ``strict`` the node limit raises instead.
    """
    limit = node_limit if node_limit is not None else settings.enumerate_node_limit
    if limit < 1:
        raise IndexOutOfRange("node limit must be at least 1", node_limit=limit)
    start = Seed.initial(quiver)
    graph = nx.DiGraph(
        truncated=False, green_only=green_only, exchange_matrix=start.quiver.principal.tolist()
    )

    def add_node(seed: Seed, level: int) -> str:
        name = seed.key.hex()
        graph.add_node(name, c=seed.c.tolist(), depth=level, all_red=seed.all_red)
        return name

    queue: List[Tuple[Seed, int]] = [(start, 0)]
    add_node(start, 0)
    position = 0
    while position < len(queue):
        seed, level = queue[position]
        position += 1
        here = seed.key.hex()
        if depth is not None and level >= depth:
            if _moves(seed, green_only):
                graph.graph["truncated"] = True
            continue
        for k in _moves(seed, green_only):
            child = seed.mutate(k)
            there = child.key.hex()
            if there not in graph:
                if graph.number_of_nodes() >= limit:
                    graph.graph["truncated"] = True
                    if strict:
                        raise ResourceLimit(
                            f"exchange graph exceeds {limit} seeds", limit=limit, explored=graph.number_of_nodes()
                        )
                    continue
                add_node(child, level + 1)
                queue.append((child, level + 1))
            if seed.is_green(k):
                source, target, vector, label = here, there, seed.c_vector(k), k
            else:
                # label in the numbering of the seed stored for ``there``
                vector = child.c_vector(k)
                source, target, label = there, here, graph.nodes[there]["c"].index(list(vector)) + 1
            if not graph.has_edge(source, target):
                graph.add_edge(source, target, vertex=label, c_vector=list(vector))
    log.info(
        "exchange graph enumerated",
        extra={"nodes": graph.number_of_nodes(), "edges": graph.number_of_edges(), "truncated": graph.graph["truncated"]},
    )
    return graph


def _moves(seed: Seed, green_only: bool) -> List[int]:
    return seed.green_vertices() if green_only else list(range(1, seed.n + 1))


def maximal_paths(graph: nx.DiGraph) -> List[GreenSequence]:
    """Maximal green sequences read off the maximal directed paths of a finite, acyclic exchange graph.

    Nodes are seeds up to permutation, so each path is replayed from the initial seed and every edge
    is resolved to the green vertex carrying its c-vector.
    """
    start = Seed.initial(IceQuiver(graph.graph["exchange_matrix"]))
    source = start.key.hex()
    sinks = sorted(v for v in graph if graph.out_degree(v) == 0)
    paths: List[GreenSequence] = []
    for sink in sinks:
        for nodes in nx.all_simple_paths(graph, source, sink):
            paths.append(_replay(start, [graph.edges[u, v]["c_vector"] for u, v in zip(nodes, nodes[1:])]))
    return sorted(paths, key=lambda p: (len(p), p.steps))


def _replay(seed: Seed, vectors: Sequence[Sequence[int]]) -> GreenSequence:
    steps: List[int] = []
    for step, vector in enumerate(vectors, start=1):
        target = tuple(vector)
        k = next((k for k in seed.green_vertices() if seed.c_vector(k) == target), None)
        if k is None:
            raise ReplayMismatch(f"no green vertex carries c-vector {list(target)}", step=step)
        steps.append(k)
        seed = seed.mutate(k)
    return GreenSequence(tuple(steps))


def graph_to_jsonl(graph: nx.DiGraph) -> str:
    """One JSON object per node, then one per edge, both sorted by canonical key."""
    lines = []
    for name in sorted(graph):
        attrs = graph.nodes[name]
        lines.append(json.dumps({"node": name, "depth": attrs["depth"], "all_red": attrs["all_red"], "c": attrs["c"]}))
    for source, target in sorted(graph.edges):
        attrs = graph.edges[source, target]
        lines.append(
            json.dumps({"edge": [source, target], "vertex": attrs["vertex"], "c_vector": attrs["c_vector"]})
        )
    return "\n".join(lines) + "\n"


def all_mgs_up_to_length(quiver: QuiverLike, max_length: int, node_limit: Optional[int] = None) -> List[GreenSequence]:
    """Every maximal green sequence of length at most ``max_length``, in lexicographic order.

    Sequences, not seeds, are the output, so nothing is deduplicated.
    """
    limit = node_limit if node_limit is not None else settings.search_node_limit
    found: List[GreenSequence] = []
    visited = 0
    stack: List[Tuple[Seed, Tuple[int, ...]]] = [(Seed.initial(quiver), ())]
    while stack:
        seed, prefix = stack.pop()
        visited += 1
        if visited > limit:
            raise ResourceLimit(f"enumeration visited more than {limit} prefixes", limit=limit, explored=visited)
        if seed.all_red:
            found.append(GreenSequence(prefix))
            continue
        if len(prefix) >= max_length:
            continue
        for k in reversed(seed.green_vertices()):
            stack.append((seed.mutate(k), prefix + (k,)))
    log.debug("all_mgs_up_to_length", extra={"max_length": max_length, "found": len(found), "visited": visited})
    return found
