"""Graph families with their canonical planar embeddings.

Every planar constructor builds its map from an explicit list of face
boundaries, oriented coherently by :func:`map_from_faces`; the resulting
rotation system is therefore checked by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor

from .map_core import CombinatorialMap, Graph, MapError, map_from_faces


class ParameterError(ValueError):
    pass


# --------------------------------------------------------------------------
# Oracle families
# --------------------------------------------------------------------------


def bouquet(n: int) -> Graph:
    if n < 1:
        raise ParameterError("bouquet needs at least one loop")
    return Graph(1, [(0, 0)] * n)


def dipole(n: int) -> Graph:
    if n < 1:
        raise ParameterError("dipole needs at least one edge")
    return Graph(2, [(0, 1)] * n)


def cycle_graph(n: int) -> tuple[Graph, CombinatorialMap]:
    if n < 3:
        raise ParameterError("cycle needs n >= 3")
    g = Graph(n, [(i, (i + 1) % n) for i in range(n)])
    return g, map_from_faces(g, [list(range(n)), list(range(n))[::-1]], orient=False)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ParameterError("complete graph needs n >= 1")
    return Graph(n, list(combinations(range(n), 2)))


def k4() -> tuple[Graph, CombinatorialMap]:
    g = complete_graph(4)
    return g, map_from_faces(g, [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def torus_grid(p: int, q: int) -> tuple[Graph, CombinatorialMap]:
    """The ``p x q`` toroidal grid C_p x C_q with its quadrangular torus embedding."""
    if p < 3 or q < 3:
        raise ParameterError("torus grid needs p, q >= 3")

    def vid(i, j):
        return (j % q) * p + (i % p)

    edges = []
    for j in range(q):
        for i in range(p):
            edges.append((vid(i, j), vid(i + 1, j)))
            edges.append((vid(i, j), vid(i, j + 1)))
    g = Graph(p * q, edges)
    faces = [[vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)] for j in range(q) for i in range(p)]
    return g, map_from_faces(g, faces)


def bouquet_interleaved() -> CombinatorialMap:
    """B_2 with rotation a b a' b' (the one-vertex torus map)."""
    return CombinatorialMap.from_rotations(bouquet(2), [[0, 2, 1, 3]])


# --------------------------------------------------------------------------
# Antiprisms
# --------------------------------------------------------------------------


class _Builder:
    """Accumulates vertices, deduplicated simple edges and face boundaries."""

    def __init__(self):
        self.n = 0
        self.edges: list[tuple[int, int]] = []
        self._edge_id: dict[frozenset, int] = {}
        self.faces: list[list[int]] = []

    def vertices(self, count: int) -> range:
        start = self.n
        self.n += count
        return range(start, self.n)

    def edge(self, u: int, v: int) -> int:
        if u == v:
            raise MapError("loop in a simple construction")
        key = frozenset((u, v))
        if key not in self._edge_id:
            self._edge_id[key] = len(self.edges)
            self.edges.append((u, v))
        return self._edge_id[key]

    def face(self, *vs: int) -> None:
        for j, u in enumerate(vs):
            self.edge(u, vs[(j + 1) % len(vs)])
        self.faces.append(list(vs))

    def edge_id(self, u: int, v: int) -> int:
        return self._edge_id[frozenset((u, v))]

    def build(self) -> tuple[Graph, CombinatorialMap]:
        g = Graph(self.n, self.edges)
        return g, map_from_faces(g, self.faces)


def _stack(builder: _Builder, m: int, b: int) -> list[list[int]]:
    """Add a stacked antiprism and its triangles; return the ``b + 1`` rings."""
    rings = [list(builder.vertices(m)) for _ in range(b + 1)]
    for lo, hi in zip(rings, rings[1:]):
        for i in range(m):
            j = (i + 1) % m
            builder.face(lo[i], lo[j], hi[j])
            builder.face(lo[i], hi[j], hi[i])
    return rings


def antiprism(m: int) -> tuple[Graph, CombinatorialMap]:
    """Rings v_i^0 (ids 0..m-1) and v_i^1 (ids m..2m-1) with edges v_i^0 v_i^1 and v_i^0 v_{i+1}^1."""
    return stacked_antiprism(m, 1)


def octahedron() -> tuple[Graph, CombinatorialMap]:
    return antiprism(3)


def stacked_antiprism(m: int, b: int) -> tuple[Graph, CombinatorialMap]:
    if m < 3:
        raise ParameterError("antiprism needs m >= 3")
    if b < 1:
        raise ParameterError("stack height must be >= 1")
    builder = _Builder()
    rings = _stack(builder, m, b)
    builder.face(*rings[0])
    builder.face(*rings[-1])
    return builder.build()


# --------------------------------------------------------------------------
# Parameters, connectors and cylinders
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionParams:
    m: int
    k: int
    b: int = 1
    d: int = 2
    g: int = 0

    def __post_init__(self):
        if self.m < 6 or self.m % 3:
            raise ParameterError("m must be a multiple of 3 with m >= 6")
        if self.k < 1 or self.b < 1 or self.d < 2:
            raise ParameterError("need k >= 1, b >= 1, d >= 2")
        if self.g < 0:
            raise ParameterError("g must be nonnegative")

    @property
    def f(self) -> int:
        """Noncontractible length threshold 6(g + 2k + 1)."""
        return 6 * (self.g + 2 * self.k + 1)

    def nu(self, vertex_count: int) -> int:
        """Vertices off the 3k connectors, using the fixed 2(d+1) per connector."""
        return vertex_count - 6 * self.k * (self.d + 1)


@dataclass(frozen=True)
class Connector:
    """An antiprismatic ladder between two rims.

    ``u[0], w[0]`` sit on the lower rim and ``u[d], w[d]`` on the upper rim;
    the end rungs are rim edges.  ``flip_edge`` is the first diagonal
    ``w_0 u_1``; ``cross_edges`` are the remaining inner rungs and diagonals.
    """

    zone: int
    index: int
    u: tuple[int, ...]
    w: tuple[int, ...]
    rungs: tuple[int, ...]
    diagonals: tuple[int, ...]
    flip_edge: int
    cross_edges: tuple[int, ...]
    left_face: tuple[int, ...] = field(repr=False)   # vertex walk of the big face on the u side
    right_face: tuple[int, ...] = field(repr=False)  # big face on the w side

    @property
    def length(self) -> int:
        return len(self.u) - 1

    @property
    def chords(self) -> tuple[int, ...]:
        return (self.flip_edge,) + self.cross_edges


@dataclass
class Construction:
    graph: Graph
    base_map: CombinatorialMap
    connectors: list[Connector]
    params: object = None
    big_faces: list[tuple[int, ...]] = field(default_factory=list)
    rim_faces: list[tuple[int, ...]] = field(default_factory=list)

    def __iter__(self):
        return iter((self.graph, self.base_map, self.connectors))

    def zone(self, j: int) -> list[Connector]:
        return [c for c in self.connectors if c.zone == j]

    @property
    def zone_count(self) -> int:
        return max((c.zone for c in self.connectors), default=0)

    def nu(self) -> int:
        return self.params.nu(self.graph.vertex_count)

    def census(self) -> dict:
        g, pi0 = self.graph, self.base_map
        return census(g, pi0) | {
            "connectors": len(self.connectors),
            "cross_edges_per_connector": sorted({len(c.cross_edges) for c in self.connectors}),
            "big_face_lengths": sorted(len(f) for f in self.big_faces),
        }


def _round_half_up(x: Fraction) -> int:
    return floor(x + Fraction(1, 2))


def _positions(m: int, count: int) -> list[int]:
    return [_round_half_up(Fraction(c * m, count)) % m for c in range(count)]


def _connect(builder: _Builder, zone: int, low: list[int], high: list[int],
             positions: list[int], d: int) -> list[tuple]:
    """Join ring ``low`` to ring ``high`` by ladders at ``positions``; return ladder data."""
    m = len(low)
    ladders = []
    for index, p in enumerate(positions, start=1):
        inner_u = list(builder.vertices(d - 1))
        inner_w = list(builder.vertices(d - 1))
        u = [low[p]] + inner_u + [high[p]]
        w = [low[(p + 1) % m]] + inner_w + [high[(p + 1) % m]]
        for t in range(d):
            builder.face(u[t], w[t], u[t + 1])
            builder.face(w[t], w[t + 1], u[t + 1])
        ladders.append((zone, index, u, w))
    for c, p in enumerate(positions):
        q = positions[(c + 1) % len(positions)]
        if (q - p) % m < 2 and len(positions) > 1:
            raise ParameterError("connector attachments collide; rim too short")
    return ladders


def _big_faces(low: list[int], high: list[int], positions: list[int], ladders) -> list[list[int]]:
    """Walk of the big face between ladder ``c`` (its w rail) and ladder ``c + 1`` (its u rail)."""
    m = len(low)
    count = len(positions)
    faces = []
    for c in range(count):
        p, q = positions[c], positions[(c + 1) % count]
        gap = (q - p - 1) % m
        w = ladders[c][3]
        u_next = ladders[(c + 1) % count][2]
        walk = [low[(p + 1 + i) % m] for i in range(gap + 1)]
        walk += u_next[1:]
        walk += [high[(q - 1 - i) % m] for i in range(gap)]
        walk += w[-2:0:-1]
        faces.append(walk)
    return faces


def _finish_connectors(builder: _Builder, ladders, big: list[list[int]]) -> list[Connector]:
    out = []
    count = len(ladders)
    for c, (zone, index, u, w) in enumerate(ladders):
        d = len(u) - 1
        rungs = tuple(builder.edge_id(u[t], w[t]) for t in range(1, d))
        diagonals = tuple(builder.edge_id(w[t], u[t + 1]) for t in range(d))
        flip = diagonals[0]
        cross = tuple(sorted(rungs + diagonals[1:]))
        out.append(Connector(zone, index, tuple(u), tuple(w), rungs, diagonals, flip, cross,
                             tuple(big[(c - 1) % count]), tuple(big[c])))
    return out


def _cylinder(m: int, b: int, zones: list[tuple[int, int]]) -> tuple[_Builder, list, list, list]:
    """Stacks joined zone by zone; ``zones[j] = (connector count, connector length)``."""
    builder = _Builder()
    stacks = [_stack(builder, m, b)]
    connectors: list[Connector] = []
    big_faces: list[list[int]] = []
    for j, (count, length) in enumerate(zones, start=1):
        stacks.append(_stack(builder, m, b))
        low, high = stacks[-2][-1], stacks[-1][0]
        positions = _positions(m, count)
        ladders = _connect(builder, j, low, high, positions, length)
        big = _big_faces(low, high, positions, ladders)
        for f in big:
            builder.face(*f)
        big_faces += big
        connectors += _finish_connectors(builder, ladders, big)
    bottom, top = stacks[0][0], stacks[-1][-1]
    return builder, connectors, big_faces, [bottom, top]


def cylinder_graph(params: ConstructionParams) -> Construction:
    """The cylinder graph: k+1 stacked antiprisms joined zone by zone by 3 ladders."""
    builder, connectors, big, rims = _cylinder(params.m, params.b, [(3, params.d)] * params.k)
    builder.face(*rims[0])
    builder.face(*rims[1])
    g, pi0 = builder.build()
    return Construction(g, pi0, connectors, params, [tuple(f) for f in big], [tuple(r) for r in rims])


def big_face_length(params: ConstructionParams) -> int:
    return 2 * params.m // 3 + 2 * params.d - 2


# --------------------------------------------------------------------------
# Disk fillers and the counterexample graph
# --------------------------------------------------------------------------


@dataclass
class DiskFiller:
    graph: Graph
    boundary: tuple[int, ...]
    base_map: CombinatorialMap
    faces: list[list[int]]  # interior faces only


def _band(inner: list[int], outer: list[int]) -> list[list[int]]:
    """Triangulate the annulus between two rings, ``len(inner) <= len(outer) <= 2 len(inner)``."""
    a, n = len(inner), len(outer)
    s = n - a
    faces = []
    start = 0
    for i in range(a):
        apex = 2 if (i + 1) * s // a > i * s // a else 1
        for t in range(start, start + apex):
            faces.append([outer[t % n], outer[(t + 1) % n], inner[i]])
        start += apex
        faces.append([inner[i], outer[start % n], inner[(i + 1) % a]])
    return faces


def _subdivided_triangle(builder: _Builder) -> tuple[list[int], list[list[int]]]:
    """One midpoint-subdivision round of a triangle; returns boundary ring and faces."""
    a, ab, b, bc, c, ca = builder.vertices(6)
    faces = [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    return [a, ab, b, bc, c, ca], faces


def disk_filler(boundary_length: int) -> DiskFiller:
    """Triangulated disk whose boundary is a cycle of the given length.

    Boundary vertices are ``0..L-1`` in cyclic order.  For ``L >= 6`` the core
    is a once-subdivided triangle, wrapped in bands whose ring lengths grow by
    at most 3 per band, which keeps every degree at most 7 and every boundary
    degree at most 4.
    """
    L = boundary_length
    if L < 3:
        raise ParameterError("boundary length must be >= 3")
    builder = _Builder()
    boundary = list(builder.vertices(L))
    faces: list[list[int]] = []
    if L == 3:
        faces.append(boundary[:])
    elif L < 6:
        (hub,) = builder.vertices(1)
        faces += [[boundary[i], boundary[(i + 1) % L], hub] for i in range(L)]
    else:
        sizes = [L]
        while sizes[-1] > 6:
            step = (sizes[-1] - 6) % 3 or 3
            sizes.append(sizes[-1] - step)
        rings = [boundary]
        for size in sizes[1:-1]:
            rings.append(list(builder.vertices(size)))
        if len(sizes) == 1:
            core = boundary
            core_faces = [[core[0], core[1], core[5]], [core[1], core[2], core[3]],
                          [core[5], core[3], core[4]], [core[1], core[3], core[5]]]
        else:
            core, core_faces = _subdivided_triangle(builder)
            rings.append(core)
        faces += core_faces
        for outer, inner in zip(rings, rings[1:]):
            faces += _band(inner, outer)
    for f in faces:
        builder.face(*f)
    builder.faces.append(boundary[::-1])
    for i in range(L):
        builder.edge(boundary[i], boundary[(i + 1) % L])
    g, cmap = builder.build()
    return DiskFiller(g, tuple(boundary), cmap, faces)


def counterexample_graph(params: ConstructionParams) -> Construction:
    """Cylinder graph with both rim faces filled by :func:`disk_filler` (genus-0 case)."""
    if params.g != 0:
        raise ParameterError("only g = 0 is supported")
    builder, connectors, big, rims = _cylinder(params.m, params.b, [(3, params.d)] * params.k)
    for rim in rims:
        filler = disk_filler(len(rim))
        relabel = {i: rim[i] for i in range(len(rim))}
        for v in range(len(rim), filler.graph.vertex_count):
            (relabel[v],) = builder.vertices(1)
        for f in filler.faces:
            builder.face(*(relabel[v] for v in f))
    g, pi0 = builder.build()
    return Construction(g, pi0, connectors, params, [tuple(f) for f in big], [])


# --------------------------------------------------------------------------
# Generalised cylinder with growing connector counts
# --------------------------------------------------------------------------


def c_coefficient(q: int, k: int) -> Fraction:
    """Connector length factor (q-1)/q + q/(4k^2) for k <= q <= 2k."""
    if k < 1 or not k <= q <= 2 * k:
        raise ParameterError(f"need k <= q <= 2k, got q={q}, k={k}")
    return Fraction(q - 1, q) + Fraction(q, 4 * k * k)


@dataclass(frozen=True)
class GeneralizedParams:
    k: int
    d: int
    b: int = 1

    @property
    def m(self) -> int:
        return max(6, 6 * self.k)

    def lengths(self) -> list[int]:
        return [_round_half_up(c_coefficient(self.k + j, self.k) * self.d) for j in range(1, self.k + 1)]


def generalized_cylinder(k: int, d: int, b: int = 1) -> Construction:
    """Zone ``j`` carries ``k + j`` ladders of length round(c_{k+j} d)."""
    if k < 1 or b < 1:
        raise ParameterError("need k >= 1 and b >= 1")
    params = GeneralizedParams(k, d, b)
    lengths = params.lengths()
    if min(lengths) < 2:
        raise ParameterError("d too small: some connector would be shorter than 2")
    zones = [(k + j, lengths[j - 1]) for j in range(1, k + 1)]
    builder, connectors, big, rims = _cylinder(params.m, b, zones)
    builder.face(*rims[0])
    builder.face(*rims[1])
    g, pi0 = builder.build()
    return Construction(g, pi0, connectors, params, [tuple(f) for f in big], [tuple(r) for r in rims])


# --------------------------------------------------------------------------
# Census
# --------------------------------------------------------------------------


def census(graph: Graph, cmap: CombinatorialMap | None = None) -> dict:
    degs = graph.degrees()
    out = {
        "vertices": graph.vertex_count,
        "edges": graph.edge_count,
        "simple": graph.is_simple(),
        "min_degree": min(degs) if degs else 0,
        "max_degree": max(degs) if degs else 0,
        "degree_histogram": {str(k): degs.count(k) for k in sorted(set(degs))},
    }
    if cmap is not None:
        lengths = [len(f) for f in cmap.faces()]
        out["faces"] = len(lengths)
        out["genus"] = cmap.genus()
        out["face_lengths"] = {str(k): lengths.count(k) for k in sorted(set(lengths))}
    return out
