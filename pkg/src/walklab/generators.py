"""Deterministic generators for the example graph families.

Each generator returns a :class:`WeightedGraph` with unit weights (unless a
``weight`` is given) and records its truncation boundary.  Vertex 0 is the
natural base point where one exists: the origin corner of the gasket, the
centre of the star and of the Vicsek tree.
"""
from __future__ import annotations

from typing import Callable

from .graph import GraphError, WeightedGraph

FAMILIES = ("path", "cycle", "box2d", "sg", "vicsek", "star", "joined")

CAPS = {
    "path": 2_000_000,
    "cycle": 2_000_000,
    "box2d": 1500,
    "sg": 9,
    "vicsek": 7,
    "star": 2_000_000,
}


class UnknownFamilyError(GraphError):
    pass


class LevelTooLargeError(GraphError):
    pass


def _check(family: str, size: int, minimum: int = 1) -> None:
    if size < minimum:
        raise GraphError(f"{family}: size/level must be at least {minimum}, got {size}")
    if size > CAPS[family]:
        raise LevelTooLargeError(f"{family}: {size} exceeds the cap {CAPS[family]}")


def path(n: int, weight: float = 1.0) -> WeightedGraph:
    _check("path", n, 2)
    return WeightedGraph(n, [(i, i + 1, weight) for i in range(n - 1)], boundary=(0, n - 1))


def cycle(n: int, weight: float = 1.0) -> WeightedGraph:
    _check("cycle", n, 3)
    return WeightedGraph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def box2d(side: int, weight: float = 1.0) -> WeightedGraph:
    """``side x side`` grid; vertex ``(i, j)`` has id ``i * side + j``."""
    _check("box2d", side, 2)
    edges = []
    for i in range(side):
        for j in range(side):
            a = i * side + j
            if j + 1 < side:
                edges.append((a, a + 1, weight))
            if i + 1 < side:
                edges.append((a, a + side, weight))
    frame = [i * side + j for i in range(side) for j in range(side)
             if i in (0, side - 1) or j in (0, side - 1)]
    return WeightedGraph(side * side, edges, boundary=frame)


def star(k: int, weight: float = 1.0) -> WeightedGraph:
    _check("star", k, 1)
    return WeightedGraph(k + 1, [(0, i, weight) for i in range(1, k + 1)])


def _from_coordinate_edges(segments, sort_key, boundary_points, weight):
    points = sorted({p for seg in segments for p in seg}, key=sort_key)
    ids = {p: i for i, p in enumerate(points)}
    edges = {(min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in segments}
    return WeightedGraph(len(points), [(a, b, weight) for a, b in sorted(edges)],
                         boundary=[ids[p] for p in boundary_points])


def sierpinski(level: int, weight: float = 1.0) -> WeightedGraph:
    """Level-``k`` pre-Sierpinski gasket of side ``2**k``.

    Points use the lattice basis ``e1 = (1, 0)``, ``e2 = (0, 1)`` of the
    triangular lattice; the graph is the union of the ``3**k`` unit
    triangles.  The two corners away from the origin are the boundary.
    """
    _check("sg", level, 0)
    offsets = [(0, 0)]
    for i in range(level):
        s = 2 ** i
        offsets = [(a + da, b + db) for da, db in ((0, 0), (s, 0), (0, s)) for a, b in offsets]
    segments = []
    for a, b in offsets:
        p, q, r = (a, b), (a + 1, b), (a, b + 1)
        segments += [(p, q), (p, r), (q, r)]
    side = 2 ** level
    return _from_coordinate_edges(segments, lambda p: (p[0] + p[1], p[0]),
                                  [(side, 0), (0, side)], weight)


def vicsek(level: int, weight: float = 1.0) -> WeightedGraph:
    """Vicsek tree: level 1 is a star with four diagonal arms; level ``k``
    glues five level ``k-1`` copies (centre plus the four diagonal corners)
    at shared corner points.  Vertex 0 is the centre; the four outer
    corners are the boundary."""
    _check("vicsek", level, 1)
    segments = [((1, 1), c) for c in ((0, 0), (2, 0), (0, 2), (2, 2))]
    side = 2
    for _ in range(level - 1):
        segments = [((ax + dx, ay + dy), (bx + dx, by + dy))
                    for dx, dy in ((side, side), (0, 0), (2 * side, 0), (0, 2 * side), (2 * side, 2 * side))
                    for (ax, ay), (bx, by) in segments]
        side *= 3
    mid = side / 2
    corners = [(0, 0), (side, 0), (0, side), (side, side)]
    return _from_coordinate_edges(
        segments, lambda p: (abs(p[0] - mid) + abs(p[1] - mid), p), corners, weight)


def joined(first: WeightedGraph, second: WeightedGraph, o1: int = 0, o2: int = 0) -> WeightedGraph:
    """Glue two graphs by identifying vertex ``o1`` of ``first`` with
    vertex ``o2`` of ``second``.

    Vertices of ``first`` keep their ids; those of ``second`` follow, with
    ``o2`` mapped onto ``o1``.  The glued vertex is dropped from the
    combined truncation boundary.
    """
    n1 = first.n
    remap = {}
    nxt = n1
    for v in range(second.n):
        if v == o2:
            remap[v] = o1
        else:
            remap[v] = nxt
            nxt += 1
    edges = list(first.edges()) + [(remap[a], remap[b], c) for a, b, c in second.edges()]
    bnd = (set(first.boundary) | {remap[b] for b in second.boundary}) - {o1}
    return WeightedGraph(nxt, edges, boundary=bnd)


_SIMPLE: dict[str, Callable[..., WeightedGraph]] = {
    "path": path,
    "cycle": cycle,
    "box2d": box2d,
    "sg": sierpinski,
    "vicsek": vicsek,
    "star": star,
}


def parse_parts(text: str) -> list[tuple[str, int]]:
    """``"path:50,star:4"`` -> ``[("path", 50), ("star", 4)]``."""
    parts = []
    for item in text.split(","):
        name, _, size = item.strip().partition(":")
        if not size:
            raise GraphError(f"joined part {item!r} must look like family:size")
        parts.append((name, int(size)))
    if len(parts) != 2:
        raise GraphError("joined needs exactly two parts")
    return parts


def generate(family: str, size: int = 0, *, weight: float = 1.0,
             parts: list[tuple[str, int]] | str | None = None,
             glue: tuple[int, int] = (0, 0)) -> WeightedGraph:
    """Build a graph of the named family.

    ``size`` is the vertex count for path/cycle, the side for box2d, the
    number of leaves for star and the level for sg/vicsek.  For ``joined``
    pass ``parts`` (two ``(family, size)`` pairs) and optionally ``glue``.
    """
    if family == "joined":
        if parts is None:
            raise GraphError("joined needs parts=[(family, size), (family, size)]")
        if isinstance(parts, str):
            parts = parse_parts(parts)
        (f1, s1), (f2, s2) = parts
        if "joined" in (f1, f2):
            raise GraphError("nested joined graphs are not supported")
        return joined(generate(f1, s1, weight=weight), generate(f2, s2, weight=weight), *glue)
    try:
        make = _SIMPLE[family]
    except KeyError:
        raise UnknownFamilyError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    return make(int(size), weight=weight)
