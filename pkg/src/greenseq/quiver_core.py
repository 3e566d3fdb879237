"""Exchange matrices, quivers, mutation, framing and c-/g-matrices.

Vertices are 1-based throughout; the frozen copy of mutable vertex ``i`` in a framed quiver
is ``n + i``. All arithmetic is exact: mutation is carried out on Python integers and the
result is converted back to int64 only after a range check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .constants import INT64_MAX, INT64_MIN
from .exceptions import IndexOutOfRange, IntegerOverflow, MalformedQuiver, SignCoherenceViolation

log = logging.getLogger("greenseq.quiver_core")

Arrow = Tuple[int, int, int]
CMatrix = np.ndarray
GMatrix = np.ndarray


class VertexColor(str, Enum):
    GREEN = "green"
    RED = "red"


def _checked(values: np.ndarray) -> np.ndarray:
    """Convert an object array of Python ints to a read-only int64 array."""
    if values.size:
        high, low = values.max(), values.min()
        if high > INT64_MAX or low < INT64_MIN:
            raise IntegerOverflow("entry outside the signed 64-bit range", high=int(high), low=int(low))
    out = values.astype(np.int64)
    out.setflags(write=False)
    return out


def _readonly(values) -> np.ndarray:
    out = np.array(values, dtype=np.int64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Quiver:
    """A quiver on vertices ``1..n + frozen`` given by arrows ``(source, target, multiplicity)``.

    Parallel arrows given separately are merged. Loops, 2-cycles and arrows between two frozen
    vertices are rejected.
    """

    n: int
    arrows: Tuple[Arrow, ...] = ()
    frozen: int = 0

    def __post_init__(self) -> None:
        if self.n < 0 or self.frozen < 0:
            raise MalformedQuiver("vertex counts must be non-negative", n=self.n, frozen=self.frozen)
        total = self.n + self.frozen
        merged: Dict[Tuple[int, int], int] = {}
        for arrow in self.arrows:
            if len(arrow) == 2:
                source, target, mult = arrow[0], arrow[1], 1
            else:
                source, target, mult = arrow
            source, target, mult = int(source), int(target), int(mult)
            if not (1 <= source <= total and 1 <= target <= total):
                raise MalformedQuiver(f"arrow {source}->{target} leaves the vertex range 1..{total}")
            if source == target:
                raise MalformedQuiver(f"loop at vertex {source}")
            if mult < 1:
                raise MalformedQuiver(f"arrow {source}->{target} has multiplicity {mult}")
            if source > self.n and target > self.n:
                raise MalformedQuiver(f"arrow {source}->{target} joins two frozen vertices")
            merged[(source, target)] = merged.get((source, target), 0) + mult
        for source, target in merged:
            if (target, source) in merged:
                raise MalformedQuiver(f"2-cycle between {source} and {target}")
        object.__setattr__(self, "arrows", tuple(sorted((s, t, m) for (s, t), m in merged.items())))

    @property
    def total(self) -> int:
        return self.n + self.frozen

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _arrow_map(self) -> Dict[Tuple[int, int], int]:
        return {(s, t): m for s, t, m in self.arrows}

    @cached_property
    def _adjacency(self) -> Dict[int, Dict[int, int]]:
        adjacency: Dict[int, Dict[int, int]] = {v: {} for v in range(1, self.total + 1)}
        for s, t, m in self.arrows:
            adjacency[s][t] = m
            adjacency[t][s] = -m
        return adjacency

    def multiplicity(self, source: int, target: int) -> int:
        """Number of arrows ``source -> target``."""
        return self._arrow_map.get((source, target), 0)

    def b(self, i: int, j: int) -> int:
        """Signed entry ``b_ij = #(i -> j) - #(j -> i)``."""
        return self._adjacency[i].get(j, 0)

    def neighbours(self, v: int) -> List[int]:
        return sorted(self._adjacency[v])

    def successors(self, v: int) -> List[int]:
        return sorted(u for u, b in self._adjacency[v].items() if b > 0)

    def predecessors(self, v: int) -> List[int]:
        return sorted(u for u, b in self._adjacency[v].items() if b < 0)

    def degree(self, v: int) -> int:
        """Degree in the underlying graph, counting multiplicities."""
        return sum(abs(b) for b in self._adjacency[v].values())

    def is_connected(self) -> bool:
        if self.total == 0:
            return True
        return nx.is_connected(self.underlying_graph())

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, self.total + 1))
        for s, t, m in self.arrows:
            graph.add_edge(s, t, mult=m)
        return graph

    def underlying_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.total + 1))
        for s, t, m in self.arrows:
            graph.add_edge(s, t, mult=m)
        return graph

    def full_subquiver(self, vertices: Iterable[int]) -> Tuple["Quiver", Tuple[int, ...]]:
        """Full subquiver on mutable ``vertices``, relabelled ``1..len`` in increasing order.

        Returns the subquiver and the tuple of original labels (position ``i - 1`` holds the
        original label of new vertex ``i``).
        """
        labels = tuple(sorted(set(vertices)))
        for v in labels:
            if not 1 <= v <= self.n:
                raise IndexOutOfRange(f"vertex {v} is not a mutable vertex", vertex=v, n=self.n)
        index = {v: i + 1 for i, v in enumerate(labels)}
        arrows = [(index[s], index[t], m) for s, t, m in self.arrows if s in index and t in index]
        return Quiver(len(labels), tuple(arrows)), labels

    def relabel(self, mapping: Dict[int, int]) -> "Quiver":
        """Rename mutable vertices by the permutation ``mapping`` (missing keys stay fixed)."""
        image = {v: mapping.get(v, v) for v in range(1, self.total + 1)}
        if sorted(image.values()) != list(range(1, self.total + 1)):
            raise MalformedQuiver("relabelling is not a permutation of the vertices")
        return Quiver(self.n, tuple((image[s], image[t], m) for s, t, m in self.arrows), self.frozen)

    def opposite(self) -> "Quiver":
        return Quiver(self.n, tuple((t, s, m) for s, t, m in self.arrows), self.frozen)

    def without_frozen(self) -> "Quiver":
        return Quiver(self.n, tuple(a for a in self.arrows if a[0] <= self.n and a[1] <= self.n))

    def to_matrix(self) -> "IceQuiver":
        return matrix_view(self)


class IceQuiver:
    """An n x m exchange matrix: rows are mutable vertices, columns all vertices."""

    __slots__ = ("_b",)

    def __init__(self, matrix: Union[np.ndarray, Sequence[Sequence[int]]]) -> None:
        try:
            raw = np.array(matrix, dtype=object)
        except (TypeError, ValueError) as exc:
            raise MalformedQuiver(f"not an integer matrix: {exc}") from exc
        if raw.ndim != 2:
            raise MalformedQuiver("exchange matrix must be two-dimensional")
        n, m = raw.shape
        if n < 1 or m < n:
            raise MalformedQuiver(f"need n >= 1 and m >= n, got {n} x {m}")
        try:
            raw = np.vectorize(int, otypes=[object])(raw)
        except (TypeError, ValueError) as exc:
            raise MalformedQuiver(f"not an integer matrix: {exc}") from exc
        b = _checked(raw)
        principal = b[:, :n]
        if not np.array_equal(principal, -principal.T):
            raise MalformedQuiver("principal part is not skew-symmetric")
        self._b = b

    @classmethod
    def _trusted(cls, b: np.ndarray) -> "IceQuiver":
        obj = cls.__new__(cls)
        obj._b = b
        return obj

    @property
    def n(self) -> int:
        return self._b.shape[0]

    @property
    def m(self) -> int:
        return self._b.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return self._b

    @property
    def principal(self) -> np.ndarray:
        return self._b[:, : self.n]

    def mutate(self, k: int) -> "IceQuiver":
        return mutate(self, k)

    def to_quiver(self) -> Quiver:
        return arrow_view(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IceQuiver):
            return NotImplemented
        return self._b.shape == other._b.shape and np.array_equal(self._b, other._b)

    def __hash__(self) -> int:
        return hash((self._b.shape, self._b.tobytes()))

    def __repr__(self) -> str:
        return f"IceQuiver(n={self.n}, m={self.m}, B={self._b.tolist()})"


def mutate(quiver: IceQuiver, k: int) -> IceQuiver:
    """Matrix mutation at the mutable vertex ``k``."""
    n = quiver.n
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"cannot mutate at {k}: mutable vertices are 1..{n}", vertex=k, n=n)
    b = quiver.matrix.astype(object)
    col = b[:, k - 1]
    row = b[k - 1, :]
    delta = (np.outer(np.abs(col), row) + np.outer(col, np.abs(row))) // 2
    result = b + delta
    result[k - 1, :] = -row
    result[:, k - 1] = -col
    return IceQuiver._trusted(_checked(result))


def matrix_view(quiver: Quiver) -> IceQuiver:
    """The exchange matrix of a quiver, frozen vertices as trailing columns."""
    if quiver.n < 1:
        raise MalformedQuiver("a quiver needs at least one mutable vertex")
    b = np.zeros((quiver.n, quiver.total), dtype=object)
    for s, t, m in quiver.arrows:
        if s <= quiver.n:
            b[s - 1, t - 1] += m
        if t <= quiver.n:
            b[t - 1, s - 1] -= m
    return IceQuiver._trusted(_checked(b))


def arrow_view(quiver: IceQuiver) -> Quiver:
    """The quiver (with frozen vertices ``n+1..m``) encoded by an exchange matrix."""
    n, m = quiver.n, quiver.m
    b = quiver.matrix
    arrows: List[Arrow] = []
    for i in range(n):
        for j in range(i + 1, m):
            value = int(b[i, j])
            if value > 0:
                arrows.append((i + 1, j + 1, value))
            elif value < 0:
                arrows.append((j + 1, i + 1, -value))
    return Quiver(n, tuple(arrows), m - n)


def _principal(quiver: Union[Quiver, IceQuiver]) -> np.ndarray:
    if isinstance(quiver, Quiver):
        if quiver.frozen:
            raise MalformedQuiver("framing expects a quiver without frozen vertices")
        return matrix_view(quiver).matrix
    if quiver.m != quiver.n:
        raise MalformedQuiver("framing expects a quiver without frozen vertices")
    return quiver.matrix


def framed(quiver: Union[Quiver, IceQuiver]) -> IceQuiver:
    """Add a frozen ``i' = n + i`` with an arrow ``i -> i'`` for every vertex."""
    b = _principal(quiver)
    return IceQuiver._trusted(_readonly(np.hstack([b, np.eye(b.shape[0], dtype=np.int64)])))


def coframed(quiver: Union[Quiver, IceQuiver]) -> IceQuiver:
    """Add a frozen ``i' = n + i`` with an arrow ``i' -> i`` for every vertex."""
    b = _principal(quiver)
    return IceQuiver._trusted(_readonly(np.hstack([b, -np.eye(b.shape[0], dtype=np.int64)])))


def c_matrix(quiver: IceQuiver) -> CMatrix:
    """The last n columns of a mutated framed matrix; every row must be sign-coherent."""
    n = quiver.n
    if quiver.m != 2 * n:
        raise MalformedQuiver(f"c-matrix needs m = 2n, got n={n}, m={quiver.m}")
    c = quiver.matrix[:, n:]
    for i, row in enumerate(c, start=1):
        if not (row >= 0).all() and not (row <= 0).all() or not row.any():
            raise SignCoherenceViolation(f"c-vector of vertex {i} is not sign-coherent", vertex=i, row=row.tolist())
    return c


def color(quiver: IceQuiver, k: int) -> VertexColor:
    if not 1 <= k <= quiver.n:
        raise IndexOutOfRange(f"vertex {k} is not mutable", vertex=k, n=quiver.n)
    row = c_matrix(quiver)[k - 1]
    return VertexColor.GREEN if (row >= 0).all() else VertexColor.RED


def g_mutate(g: GMatrix, quiver: IceQuiver, k: int) -> GMatrix:
    """Mutate the g-matrix of the seed ``quiver`` at ``k``; only row ``k`` changes."""
    if not 1 <= k <= quiver.n:
        raise IndexOutOfRange(f"vertex {k} is not mutable", vertex=k, n=quiver.n)
    n = quiver.n
    principal = quiver.principal.astype(object)
    rows = np.array(g, dtype=object)
    if color(quiver, k) is VertexColor.GREEN:
        weights = np.maximum(principal[:, k - 1], 0)  # arrows j -> k
    else:
        weights = np.maximum(principal[k - 1, :], 0)  # arrows k -> j
    new_row = -rows[k - 1] + sum((weights[j] * rows[j] for j in range(n) if weights[j]), np.zeros(n, dtype=object))
    result = rows.copy()
    result[k - 1] = new_row
    return _checked(result)


def _exact_inverse(matrix: np.ndarray) -> Tuple[List[List[Fraction]], Fraction]:
    size = matrix.shape[0]
    work = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(matrix)]
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if work[r][col] != 0), None)
        if pivot is None:
            raise SignCoherenceViolation("c-matrix is singular")
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det *= work[col][col]
        lead = work[col][col]
        work[col] = [x / lead for x in work[col]]
        for r in range(size):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [a - factor * b for a, b in zip(work[r], work[col], strict=True)]
    return [row[size:] for row in work], det


def determinant(matrix: np.ndarray) -> int:
    _, det = _exact_inverse(np.asarray(matrix))
    return int(det)


def g_from_c(c: CMatrix) -> GMatrix:
    """``(C^-1)^T`` computed exactly; C is unimodular for every reachable seed."""
    inverse, det = _exact_inverse(np.asarray(c))
    if abs(det) != 1:
        raise SignCoherenceViolation(f"c-matrix has determinant {det}", det=str(det))
    return _readonly([[int(inverse[j][i]) for j in range(len(inverse))] for i in range(len(inverse))])


def canonical_key(c: CMatrix) -> bytes:
    """Seed key up to simultaneous permutation: rows sorted lexicographically, then serialized."""
    rows = sorted(tuple(int(x) for x in row) for row in np.asarray(c))
    n = len(rows)
    return n.to_bytes(4, "big") + np.array(rows, dtype=np.int64).reshape(n, -1).tobytes()


@dataclass(frozen=True)
class Seed:
    """A framed exchange matrix together with its g-matrix."""

    quiver: IceQuiver
    g: GMatrix

    @classmethod
    def initial(cls, quiver: Union[Quiver, IceQuiver]) -> "Seed":
        framed_quiver = framed(quiver)
        return cls(framed_quiver, _readonly(np.eye(framed_quiver.n, dtype=np.int64)))

    @property
    def n(self) -> int:
        return self.quiver.n

    @cached_property
    def c(self) -> CMatrix:
        return c_matrix(self.quiver)

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self.c)

    def c_vector(self, k: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.c[k - 1])

    def is_green(self, k: int) -> bool:
        return bool((self.c[k - 1] >= 0).all())

    def green_vertices(self) -> List[int]:
        return [k for k in range(1, self.n + 1) if self.is_green(k)]

    @property
    def all_red(self) -> bool:
        return bool((self.c <= 0).all())

    def mutate(self, k: int) -> "Seed":
        return Seed(mutate(self.quiver, k), g_mutate(self.g, self.quiver, k))

    def duality_holds(self) -> bool:
        return np.array_equal(g_from_c(self.c), self.g)
