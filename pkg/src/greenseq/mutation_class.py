import logging
from collections import defaultdict
from typing import Dict, List, Optional

import networkx as nx
import numpy as np

from .exceptions import ResourceLimit
from .quiver_core import Quiver, arrow_view, matrix_view, mutate
from .settings import settings

log = logging.getLogger("greenseq.mutation_class")


def _same_multiplicity(a: dict, b: dict) -> bool:
    return a["mult"] == b["mult"]


class _IsoRegistry:
    """Quivers bucketed by Weisfeiler-Lehman hash, compared exactly inside a bucket."""

    def __init__(self) -> None:
        self.buckets: Dict[str, List[nx.DiGraph]] = defaultdict(list)

    def add(self, quiver: Quiver) -> bool:
        graph = quiver.to_networkx()
        digest = nx.weisfeiler_lehman_graph_hash(graph, edge_attr="mult")
        for other in self.buckets[digest]:
            if nx.is_isomorphic(graph, other, edge_match=_same_multiplicity):
                return False
        self.buckets[digest].append(graph)
        return True


def mutation_class(quiver: Quiver, limit: Optional[int] = None) -> List[Quiver]:
    """All quivers mutation equivalent to ``quiver`` up to isomorphism, in discovery order."""
    limit = limit if limit is not None else settings.class_limit
    start = quiver.without_frozen()
    registry = _IsoRegistry()
    registry.add(start)
    found = [start]
    position = 0
    while position < len(found):
        current = found[position]
        position += 1
        matrix = matrix_view(current)
        for k in current.vertices:
            candidate = arrow_view(mutate(matrix, k))
            if registry.add(candidate):
                found.append(candidate)
                if len(found) > limit:
                    raise ResourceLimit(f"mutation class exceeds {limit} quivers", limit=limit, explored=len(found))
    log.debug("mutation class enumerated", extra={"n": start.n, "size": len(found)})
    return found


def is_acyclic(quiver: Quiver) -> bool:
    return quiver.is_acyclic()


def random_mutation(quiver: Quiver, steps: int, rng: Optional[np.random.Generator] = None) -> Quiver:
    """Mutate ``steps`` times at random vertices, never undoing the previous step."""
    rng = rng if rng is not None else np.random.default_rng()
    matrix = matrix_view(quiver)
    previous = None
    for _ in range(steps):
        choices = [k for k in quiver.vertices if k != previous] or [previous]
        k = int(rng.choice(choices))
        matrix = mutate(matrix, k)
        previous = k
    return arrow_view(matrix)
