"""Weighted graphs, metric sets and the edge-list file format.

A :class:`WeightedGraph` is immutable.  Vertex ids are dense integers
``0..n-1``; edges are stored once with ``u < v`` and sorted.  Generated
graphs that stand in for an infinite graph carry the set of truncation
``boundary`` vertices, which the verifiers use to decide whether a ball is
far enough from the cut.
"""
from __future__ import annotations

import hashlib
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp


class GraphError(ValueError):
    """Base class for graph construction and validation errors."""


class GraphFormatError(GraphError):
    """A line of an edge-list document could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfLoopError(GraphFormatError):
    pass


class DuplicateEdgeError(GraphFormatError):
    pass


class NonPositiveWeightError(GraphFormatError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class WeightedGraph:
    """Finite connected graph with symmetric positive edge weights.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (u, v, w)
        Undirected edges, each listed once.
    boundary : iterable of int, optional
        Truncation boundary of a generated graph (vertices whose
        neighbourhood in the infinite model is cut off).
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]],
                 boundary: Iterable[int] = ()):
        n = int(n)
        if n <= 0:
            raise GraphError("graph must have at least one vertex")
        canon: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if not w > 0 or not math.isfinite(w):
                raise NonPositiveWeightError(f"weight of edge ({u}, {v}) must be positive, got {w}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise DuplicateEdgeError(f"duplicate edge {key}")
            canon[key] = w
        keys = sorted(canon)
        self.n = n
        self.u = np.array([k[0] for k in keys], dtype=np.int64)
        self.v = np.array([k[1] for k in keys], dtype=np.int64)
        self.w = np.array([canon[k] for k in keys], dtype=float)
        self.boundary = frozenset(int(b) for b in boundary)

        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.concatenate([self.w, self.w])
        self.W = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        self.W.sort_indices()
        self.mu = np.asarray(self.W.sum(axis=1)).ravel()
        if n > 1 and np.any(self.mu == 0):
            raise DisconnectedGraphError("graph has isolated vertices")
        if not self._connected():
            raise DisconnectedGraphError("graph is not connected")

    # -- basic structure ---------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.w)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for a, b, c in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            yield a, b, c

    def neighbors(self, x: int) -> np.ndarray:
        return self.W.indices[self.W.indptr[x]:self.W.indptr[x + 1]]

    def degree(self, x: int) -> int:
        return int(self.W.indptr[x + 1] - self.W.indptr[x])

    @cached_property
    def P(self) -> sp.csr_matrix:
        """Transition matrix ``P(x, y) = mu_xy / mu(x)``."""
        return sp.csr_matrix(sp.diags(1.0 / self.mu) @ self.W)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.boundary)] = True
        return mask

    def _connected(self) -> bool:
        return bool(np.all(self.distances(0) >= 0))

    def distances(self, x: int) -> np.ndarray:
        """BFS distances from ``x``; unreachable vertices get -1."""
        cache = self.__dict__.setdefault("_dist_cache", {})
        if x in cache:
            return cache[x]
        indptr, indices = self.W.indptr, self.W.indices
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[x] = 0
        queue = deque([x])
        while queue:
            a = queue.popleft()
            da = dist[a] + 1
            for b in indices[indptr[a]:indptr[a + 1]]:
                if dist[b] < 0:
                    dist[b] = da
                    queue.append(b)
        dist.flags.writeable = False
        if len(cache) < 4096:
            cache[x] = dist
        return dist

    def digest(self) -> str:
        return hashlib.sha256(dumps_graph(self).encode()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.u, other.u)
                and np.array_equal(self.v, other.v) and np.array_equal(self.w, other.w)
                and self.boundary == other.boundary)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Set of vertices stored as a boolean mask.

    ``center`` and ``radius`` are set when the set is a ball or a sphere.
    """

    mask: np.ndarray
    center: int | None = None
    radius: float | None = None
    ids: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "ids", np.flatnonzero(mask))

    @classmethod
    def of(cls, g: WeightedGraph, members: Iterable[int] | "VertexSet" | np.ndarray) -> "VertexSet":
        if isinstance(members, VertexSet):
            return members
        if isinstance(members, (set, frozenset)):
            members = sorted(members)
        arr = np.asarray(members)
        if arr.dtype == bool and arr.shape == (g.n,):
            return cls(arr)
        mask = np.zeros(g.n, dtype=bool)
        mask[np.asarray(list(arr.ravel()), dtype=np.int64)] = True
        return cls(mask)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids.tolist())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, VertexSet):
            return np.array_equal(self.mask, other.mask)
        try:
            return set(self.ids.tolist()) == set(other)  # type: ignore[arg-type]
        except TypeError:
            return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"VertexSet({self.ids.tolist()})"


def as_mask(g: WeightedGraph, s) -> np.ndarray:
    return VertexSet.of(g, s).mask


# -- metric operations -------------------------------------------------------

def distance(g: WeightedGraph, x: int, y: int) -> int:
    return int(g.distances(x)[y])


def ball(g: WeightedGraph, x: int, R: float) -> VertexSet:
    """Open ball ``{y : d(x, y) < R}``; ``R`` may be any real."""
    return VertexSet(g.distances(x) < R, center=x, radius=R)


def sphere(g: WeightedGraph, x: int, R: float) -> VertexSet:
    return VertexSet(g.distances(x) == R, center=x, radius=R)


def closure(g: WeightedGraph, s) -> VertexSet:
    """``A`` together with all neighbours of ``A``."""
    mask = as_mask(g, s)
    reach = (g.W.T @ mask.astype(float)) > 0
    return VertexSet(mask | reach)


def boundary(g: WeightedGraph, s) -> VertexSet:
    """Outer vertex boundary: closure minus the set itself."""
    mask = as_mask(g, s)
    return VertexSet(closure(g, mask).mask & ~mask)


def inner_boundary(g: WeightedGraph, s) -> VertexSet:
    """Members of ``s`` with at least one neighbour outside ``s``."""
    mask = as_mask(g, s)
    outside = (g.W @ (~mask).astype(float)) > 0
    return VertexSet(mask & outside)


@dataclass(frozen=True)
class MetricSets:
    ball: VertexSet
    sphere: VertexSet
    closure: VertexSet
    boundary: VertexSet


def metric_sets(g: WeightedGraph, x: int, R: float) -> MetricSets:
    b = ball(g, x, R)
    s = sphere(g, x, math.floor(R)) if float(R).is_integer() else VertexSet(np.zeros(g.n, bool))
    return MetricSets(b, s, closure(g, b), boundary(g, b))


def volume(g: WeightedGraph, x: int, R: float) -> float:
    """``V(x, R) = mu(B(x, R))``."""
    return float(g.mu[g.distances(x) < R].sum())


def shortest_path_union(g: WeightedGraph, x: int, y: int) -> VertexSet:
    dx, dy = g.distances(x), g.distances(y)
    return VertexSet(dx + dy == dx[y])


def p0_check(g: WeightedGraph) -> float:
    """Smallest one-step transition probability over both edge orientations."""
    if g.num_edges == 0:
        return 1.0
    return float(min((g.w / g.mu[g.u]).min(), (g.w / g.mu[g.v]).min()))


@dataclass(frozen=True)
class InteriorMargin:
    """A computation at ``(x, R)`` is interior-valid iff ``B(x, factor*R)``
    holds no truncation-boundary vertex."""

    factor: float = 9.0

    def valid(self, g: WeightedGraph, x: int, R: float) -> bool:
        if not g.boundary:
            return True
        return not bool(np.any(g.boundary_mask & (g.distances(x) < self.factor * R)))


def interior_valid(g: WeightedGraph, x: int, R: float, factor: float = 9.0) -> bool:
    return InteriorMargin(factor).valid(g, x, R)


# -- edge-list I/O -----------------------------------------------------------

def loads_graph(text: str) -> WeightedGraph:
    """Parse an edge-list document.

    Each non-comment line is ``u v w``.  Ids are compacted to ``0..n-1``
    keeping their relative order, so files already using dense ids load
    unchanged.  A comment line ``# boundary: a b ...``
    (written by :func:`dumps_graph`) restores the truncation boundary.
    """
    seen: set[tuple[int, int]] = set()
    edges = []
    boundary_raw: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("boundary:"):
                try:
                    boundary_raw.extend(int(t) for t in body[len("boundary:"):].split())
                except ValueError:
                    raise GraphFormatError("malformed boundary comment", lineno) from None
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'u v w', got {raw!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise GraphFormatError(f"expected 'u v w', got {raw!r}", lineno) from None
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}", lineno)
        if not w > 0 or not math.isfinite(w):
            raise NonPositiveWeightError(f"nonpositive weight {parts[2]}", lineno)
        key = (min(a, b), max(a, b))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {a} {b}", lineno)
        seen.add(key)
        edges.append((a, b, w))
    if not edges:
        raise GraphFormatError("no edges")
    ids = {t: i for i, t in enumerate(sorted({t for e in edges for t in e[:2]}))}
    edges = [(ids[a], ids[b], w) for a, b, w in edges]
    unknown = [b for b in boundary_raw if b not in ids]
    if unknown:
        raise GraphFormatError(f"boundary vertices {unknown} do not occur in any edge")
    return WeightedGraph(len(ids), edges, boundary=[ids[b] for b in boundary_raw])


def load_graph(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return loads_graph(fh.read())


def dumps_graph(g: WeightedGraph) -> str:
    lines = [f"# walklab edge list: {g.n} vertices, {g.num_edges} edges"]
    if g.boundary:
        lines.append("# boundary: " + " ".join(str(b) for b in sorted(g.boundary)))
    lines.extend(f"{a} {b} {c!r}" for a, b, c in g.edges())
    return "\n".join(lines) + "\n"


def save_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_graph(g))
