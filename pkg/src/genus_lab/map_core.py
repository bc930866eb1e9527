"""Rotation systems (combinatorial maps) for 2-cell embeddings.

Edge ``i`` owns darts ``2*i`` (at its first endpoint) and ``2*i + 1`` (at its
second endpoint), so the edge involution is ``d ^ 1``.  ``sigma[d]`` is the
dart following ``d`` around its vertex and the faces are the orbits of the
face successor ``phi(d) = sigma[d ^ 1]``.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class MapError(ValueError):
    """Raised for malformed graphs, rotation systems, cycles or map files."""


class Graph:
    """Connected undirected multigraph; loops and parallel edges allowed."""

    __slots__ = ("vertex_count", "edges", "_darts_at")

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]], *, check: bool = True):
        self.vertex_count = int(vertex_count)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        darts_at: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise MapError(f"edge {i} endpoint out of range: {(u, v)}")
            darts_at[u].append(2 * i)
            darts_at[v].append(2 * i + 1)
        self._darts_at = tuple(tuple(sorted(ds)) for ds in darts_at)
        if check and self.vertex_count == 0:
            raise MapError("graph has no vertices")
        if check and not self.is_connected():
            raise MapError("graph is disconnected")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def dart_count(self) -> int:
        return 2 * len(self.edges)

    def vertex_of(self, dart: int) -> int:
        return self.edges[dart >> 1][dart & 1]

    def head(self, dart: int) -> int:
        """Vertex at the far end of ``dart``."""
        return self.edges[dart >> 1][(dart & 1) ^ 1]

    def darts_at(self, v: int) -> tuple[int, ...]:
        return self._darts_at[v]

    def degree(self, v: int) -> int:
        return len(self._darts_at[v])

    def degrees(self) -> list[int]:
        return [len(ds) for ds in self._darts_at]

    def neighbors(self, v: int) -> set[int]:
        return {self.head(d) for d in self._darts_at[v]} - {v}

    def adjacency(self) -> list[set[int]]:
        return [self.neighbors(v) for v in range(self.vertex_count)]

    def is_simple(self) -> bool:
        seen = set()
        for u, v in self.edges:
            key = (min(u, v), max(u, v))
            if u == v or key in seen:
                return False
            seen.add(key)
        return True

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map ``(u, v)`` to the lowest edge index joining them, both orders."""
        index: dict[tuple[int, int], int] = {}
        for i, (u, v) in enumerate(self.edges):
            index.setdefault((u, v), i)
            index.setdefault((v, u), i)
        return index

    def is_connected(self, removed: Iterable[int] = ()) -> bool:
        """Connectivity of the graph minus ``removed``; an empty remainder counts as connected."""
        gone = set(removed)
        alive = [v for v in range(self.vertex_count) if v not in gone]
        if not alive:
            return True
        seen = {alive[0]}
        queue = [alive[0]]
        while queue:
            v = queue.pop()
            for d in self._darts_at[v]:
                w = self.head(d)
                if w not in seen and w not in gone:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(alive)

    def __eq__(self, other):
        return isinstance(other, Graph) and (self.vertex_count, self.edges) == (other.vertex_count, other.edges)

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return f"Graph(vertex_count={self.vertex_count}, edges={len(self.edges)})"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


def _check_rotation(graph: Graph, sigma: Sequence[int]) -> str:
    n = graph.dart_count
    if len(sigma) != n:
        return f"sigma has length {len(sigma)}, expected {n}"
    seen = [False] * n
    for d in sigma:
        if not (0 <= d < n) or seen[d]:
            return "sigma is not a permutation"
        seen[d] = True
    visited = [False] * n
    for v in range(graph.vertex_count):
        ds = graph.darts_at(v)
        if not ds:
            continue
        orbit = []
        d = ds[0]
        while not visited[d]:
            visited[d] = True
            orbit.append(d)
            d = sigma[d]
        if sorted(orbit) != list(ds):
            return f"orbit/vertex mismatch at vertex {v}"
    return ""


def validate_map(graph: Graph, sigma: Sequence[int]) -> ValidationReport:
    """Check a candidate rotation ``sigma`` on ``graph``; report the first violated invariant."""
    if graph.vertex_count == 0 or not graph.is_connected():
        return ValidationReport(False, "graph is disconnected")
    reason = _check_rotation(graph, sigma)
    if reason:
        return ValidationReport(False, reason)
    return ValidationReport(True)


def _face_orbits(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    n = len(sigma)
    seen = [False] * n
    faces = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = []
        d = start
        while not seen[d]:
            seen[d] = True
            orbit.append(d)
            d = sigma[d ^ 1]
        faces.append(tuple(orbit))
    return faces


def count_faces(sigma: Sequence[int]) -> int:
    """Number of orbits of ``phi`` without materialising them."""
    n = len(sigma)
    seen = bytearray(n)
    faces = 0
    for start in range(n):
        if seen[start]:
            continue
        faces += 1
        d = start
        while not seen[d]:
            seen[d] = 1
            d = sigma[d ^ 1]
    return faces


def euler_genus(vertices: int, edges: int, faces: int) -> int:
    twice = 2 - vertices + edges - faces
    if twice < 0 or twice % 2:
        raise MapError(f"non-integral genus from V={vertices}, E={edges}, F={faces}")
    return twice // 2


class CombinatorialMap:
    """An immutable rotation system on a connected graph."""

    __slots__ = ("graph", "sigma", "_faces", "_face_of")

    def __init__(self, graph: Graph, sigma: Sequence[int], *, check: bool = True):
        self.graph = graph
        self.sigma = tuple(int(d) for d in sigma)
        if check:
            report = validate_map(graph, self.sigma)
            if not report:
                raise MapError(report.reason)
        self._faces = None
        self._face_of = None

    @classmethod
    def from_rotations(cls, graph: Graph, rotations: Sequence[Sequence[int]]) -> "CombinatorialMap":
        """Build from one cyclic dart list per vertex."""
        if len(rotations) != graph.vertex_count:
            raise MapError("need one rotation per vertex")
        sigma = [-1] * graph.dart_count
        for v, rot in enumerate(rotations):
            if sorted(rot) != list(graph.darts_at(v)):
                raise MapError(f"rotation of vertex {v} does not list exactly its darts")
            for i, d in enumerate(rot):
                if not 0 <= d < len(sigma):
                    raise MapError(f"dart {d} out of range")
                sigma[d] = rot[(i + 1) % len(rot)]
        return cls(graph, sigma)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    def phi(self, dart: int) -> int:
        return self.sigma[dart ^ 1]

    def rotation(self, v: int) -> tuple[int, ...]:
        """Cyclic dart order at ``v`` starting from its minimal dart."""
        ds = self.graph.darts_at(v)
        if not ds:
            return ()
        out = [ds[0]]
        d = self.sigma[ds[0]]
        while d != ds[0]:
            out.append(d)
            d = self.sigma[d]
        return tuple(out)

    def rotations(self) -> list[tuple[int, ...]]:
        return [self.rotation(v) for v in range(self.vertex_count)]

    def faces(self) -> list[tuple[int, ...]]:
        if self._faces is None:
            faces = _face_orbits(self.sigma)
            if not faces:
                faces = [()]  # single vertex, no edges: the whole sphere is one face
            self._faces = faces
        return self._faces

    def face_index(self) -> list[int]:
        """``face_index()[d]`` is the index of the face containing dart ``d``."""
        if self._face_of is None:
            face_of = [0] * self.graph.dart_count
            for i, face in enumerate(self.faces()):
                for d in face:
                    face_of[d] = i
            self._face_of = face_of
        return self._face_of

    @property
    def face_count(self) -> int:
        return len(self.faces())

    def face_vertices(self, face: Sequence[int]) -> list[int]:
        return [self.graph.vertex_of(d) for d in face]

    def genus(self) -> int:
        return euler_genus(self.vertex_count, self.edge_count, self.face_count)

    def reverse(self) -> "CombinatorialMap":
        inverse = [0] * len(self.sigma)
        for d, s in enumerate(self.sigma):
            inverse[s] = d
        return CombinatorialMap(self.graph, inverse, check=False)

    def __eq__(self, other):
        return isinstance(other, CombinatorialMap) and self.graph == other.graph and self.sigma == other.sigma

    def __hash__(self):
        return hash((self.graph, self.sigma))

    def __repr__(self):
        return f"CombinatorialMap(V={self.vertex_count}, E={self.edge_count}, F={self.face_count})"


def trace_faces(cmap: CombinatorialMap) -> list[tuple[int, ...]]:
    """Face orbits of ``phi = sigma o alpha``, each starting at its minimal dart, sorted."""
    return list(cmap.faces())


def genus(cmap: CombinatorialMap) -> int:
    return cmap.genus()


def reverse(cmap: CombinatorialMap) -> CombinatorialMap:
    return cmap.reverse()


# --------------------------------------------------------------------------
# Cycles and surgery
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    """A closed simple walk given by its darts (each dart leaves the current vertex)."""

    darts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "darts", tuple(int(d) for d in self.darts))
        if not self.darts:
            raise MapError("empty cycle")

    def __len__(self):
        return len(self.darts)

    def edges(self) -> tuple[int, ...]:
        return tuple(d >> 1 for d in self.darts)

    def vertices(self, graph: Graph) -> tuple[int, ...]:
        return tuple(graph.vertex_of(d) for d in self.darts)

    def reversed(self) -> "Cycle":
        return Cycle(tuple(d ^ 1 for d in reversed(self.darts)))

    def check(self, graph: Graph) -> None:
        n = graph.dart_count
        ds = self.darts
        for d in ds:
            if not 0 <= d < n:
                raise MapError(f"dart {d} not in map")
        for i, d in enumerate(ds):
            if graph.head(d) != graph.vertex_of(ds[(i + 1) % len(ds)]):
                raise MapError("cycle darts do not chain head-to-tail")
        verts = self.vertices(graph)
        if len(set(verts)) != len(verts) or len(set(self.edges())) != len(ds):
            raise MapError("cycle is not simple")

    @classmethod
    def from_vertices(cls, graph: Graph, vertices: Sequence[int]) -> "Cycle":
        """Cycle through ``vertices`` in order, using the lowest-index edge for each step."""
        vs = list(vertices)
        if not vs:
            raise MapError("empty cycle")
        darts = []
        used = set()
        for i, v in enumerate(vs):
            w = vs[(i + 1) % len(vs)]
            choice = None
            for d in graph.darts_at(v):
                if graph.head(d) == w and (d >> 1) not in used:
                    if v == w and d & 1:
                        continue
                    choice = d
                    break
            if choice is None:
                raise MapError(f"no unused edge from {v} to {w}")
            used.add(choice >> 1)
            darts.append(choice)
        cycle = cls(tuple(darts))
        cycle.check(graph)
        return cycle


@dataclass
class _Surface:
    """Raw rotation data; the graph may be disconnected after surgery."""

    vertex_count: int
    edges: list[list[int]]
    sigma: list[int]
    boundaries: list[tuple[int, int]] = field(default_factory=list)

    def vertex_of(self, d: int) -> int:
        return self.edges[d >> 1][d & 1]


def _split(surface: _Surface, darts: Sequence[int]) -> _Surface:
    """Cut along the simple cycle ``darts`` and cap both boundary circles.

    Non-cycle darts keep their ids.  The A side of each cycle vertex keeps the
    old vertex id and old cycle darts; the B side gets fresh vertices and a
    fresh copy of every cycle edge.
    """
    L = len(darts)
    E = len(surface.edges)
    nv = surface.vertex_count
    sigma = surface.sigma + [0] * (2 * L)
    edges = [list(e) for e in surface.edges] + [[0, 0] for _ in range(L)]
    old = surface.sigma

    def b_copy(d: int, i: int) -> int:
        return 2 * (E + i) + (d & 1)

    pos = {d >> 1: i for i, d in enumerate(darts)}
    for i, out in enumerate(darts):
        x = surface.vertex_of(out)
        xb = nv + i
        inn = darts[i - 1] ^ 1
        side_a = []
        d = old[out]
        while d != inn:
            side_a.append(d)
            d = old[d]
        side_b = []
        d = old[inn]
        while d != out:
            side_b.append(d)
            d = old[d]
        ring_a = [out] + side_a + [inn]
        for j, d in enumerate(ring_a):
            sigma[d] = ring_a[(j + 1) % len(ring_a)]
        out_b = b_copy(out, pos[out >> 1])
        in_b = b_copy(inn, pos[inn >> 1])
        ring_b = [in_b] + side_b + [out_b]
        for j, d in enumerate(ring_b):
            sigma[d] = ring_b[(j + 1) % len(ring_b)]
        for d in side_b:
            edges[d >> 1][d & 1] = xb
        edges[out_b >> 1][out_b & 1] = xb
        edges[in_b >> 1][in_b & 1] = xb
        del x
    boundary = (darts[0], b_copy(darts[0] ^ 1, 0))
    return _Surface(nv + L, edges, sigma, surface.boundaries + [boundary])


@dataclass(frozen=True)
class _Component:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    genus: int
    boundaries: tuple[int, ...]  # indices into _Surface.boundaries, A side = 2i, B side = 2i + 1


def _components(surface: _Surface) -> list[_Component]:
    parent = list(range(surface.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in surface.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    verts = defaultdict(list)
    for v in range(surface.vertex_count):
        verts[find(v)].append(v)
    edges = defaultdict(list)
    for i, (u, _) in enumerate(surface.edges):
        edges[find(u)].append(i)
    faces = defaultdict(int)
    face_root = {}
    sigma = surface.sigma
    seen = bytearray(len(sigma))
    for start in range(len(sigma)):
        if seen[start]:
            continue
        root = find(surface.vertex_of(start))
        faces[root] += 1
        d = start
        while not seen[d]:
            seen[d] = 1
            face_root[d] = root
            d = sigma[d ^ 1]
    tags = defaultdict(list)
    for i, (da, db) in enumerate(surface.boundaries):
        tags[face_root[da]].append(2 * i)
        tags[face_root[db]].append(2 * i + 1)
    out = []
    for root in sorted(verts):
        nf = faces[root] if edges[root] else 1
        g = euler_genus(len(verts[root]), len(edges[root]), nf)
        out.append(_Component(tuple(verts[root]), tuple(edges[root]), g, tuple(sorted(tags[root]))))
    return out


def _surface_of(cmap: CombinatorialMap) -> _Surface:
    return _Surface(cmap.vertex_count, [list(e) for e in cmap.graph.edges], list(cmap.sigma))


def _component_map(surface: _Surface, comp: _Component) -> CombinatorialMap:
    vmap = {v: i for i, v in enumerate(comp.vertices)}
    emap = {e: i for i, e in enumerate(comp.edges)}
    graph = Graph(len(vmap), [(vmap[surface.edges[e][0]], vmap[surface.edges[e][1]]) for e in comp.edges])
    sigma = [0] * graph.dart_count
    for e in comp.edges:
        for side in (0, 1):
            d = 2 * e + side
            s = surface.sigma[d]
            sigma[2 * emap[e] + side] = 2 * emap[s >> 1] + (s & 1)
    return CombinatorialMap(graph, sigma)


@dataclass(frozen=True)
class CutResult:
    separating: bool
    components: tuple[CombinatorialMap, ...]

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(c.genus() for c in self.components)


def cut_along_cycle(cmap: CombinatorialMap, cycle: Cycle) -> CutResult:
    """Cut the surface along ``cycle`` and cap each boundary circle with a disk."""
    cycle.check(cmap.graph)
    surface = _split(_surface_of(cmap), cycle.darts)
    comps = _components(surface)
    maps = tuple(_component_map(surface, c) for c in comps)
    return CutResult(len(comps) == 2, maps)


def cut_components(cmap: CombinatorialMap, *cycles: Cycle) -> list[_Component]:
    """Genus census of the capped pieces after cutting along pairwise disjoint cycles."""
    surface = _surface_of(cmap)
    for c in cycles:
        c.check(cmap.graph)
        surface = _split(surface, c.darts)
    return _components(surface)


def dual_graph(cmap: CombinatorialMap) -> Graph:
    """Faces become vertices; dual edge ``i`` joins the faces of darts ``2i`` and ``2i+1``."""
    face_of = cmap.face_index()
    edges = [(face_of[2 * i], face_of[2 * i + 1]) for i in range(cmap.edge_count)]
    return Graph(cmap.face_count, edges)


# --------------------------------------------------------------------------
# Construction helpers for maps given by their face boundaries
# --------------------------------------------------------------------------


def orient_faces(faces: Sequence[Sequence[int]]) -> list[list[int]]:
    """Reverse some face walks so every edge is traversed once in each direction.

    Faces are vertex cycles of a simple graph.  Raises ``MapError`` if no
    coherent orientation exists.
    """
    faces = [list(f) for f in faces]
    by_edge: dict[frozenset, list[int]] = defaultdict(list)
    for i, f in enumerate(faces):
        for j, u in enumerate(f):
            by_edge[frozenset((u, f[(j + 1) % len(f)]))].append(i)
    for key, fs in by_edge.items():
        if len(fs) != 2:
            raise MapError(f"edge {sorted(key)} lies on {len(fs)} face sides")

    def directed(f):
        return {(u, f[(j + 1) % len(f)]) for j, u in enumerate(f)}

    fixed = [False] * len(faces)
    for root in range(len(faces)):
        if fixed[root]:
            continue
        fixed[root] = True
        queue = deque([root])
        while queue:
            i = queue.popleft()
            di = directed(faces[i])
            for u, v in di:
                for j in by_edge[frozenset((u, v))]:
                    if j == i:
                        continue
                    if fixed[j]:
                        if (u, v) in directed(faces[j]):
                            raise MapError("faces admit no coherent orientation")
                        continue
                    if (u, v) in directed(faces[j]):
                        faces[j].reverse()
                    fixed[j] = True
                    queue.append(j)
    return faces


def map_from_faces(graph: Graph, faces: Sequence[Sequence[int]], *, orient: bool = True) -> CombinatorialMap:
    """Rotation system of a simple graph whose face boundaries are the given vertex cycles."""
    if orient:
        faces = orient_faces(faces)
    dart = {}
    for i, (u, v) in enumerate(graph.edges):
        dart[(u, v)] = 2 * i
        dart[(v, u)] = 2 * i + 1
    phi = [-1] * graph.dart_count
    for f in faces:
        ds = [dart[(u, f[(j + 1) % len(f)])] for j, u in enumerate(f)]
        for j, d in enumerate(ds):
            if phi[d] != -1:
                raise MapError("dart used by two faces")
            phi[d] = ds[(j + 1) % len(ds)]
    if -1 in phi:
        raise MapError("faces do not cover every dart")
    sigma = [phi[d ^ 1] for d in range(graph.dart_count)]
    return CombinatorialMap(graph, sigma)


# --------------------------------------------------------------------------
# .cmap text format
# --------------------------------------------------------------------------


def format_cmap(cmap: CombinatorialMap) -> str:
    g = cmap.graph
    lines = [f"vertices {g.vertex_count}", f"edges {g.edge_count}"]
    lines += [f"edge {i} {u} {v}" for i, (u, v) in enumerate(g.edges)]
    for v in range(g.vertex_count):
        lines.append(f"rotation {v}: " + " ".join(map(str, cmap.rotation(v))))
    return "\n".join(lines) + "\n"


def parse_cmap(text: str) -> CombinatorialMap:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]

    def header(i, key):
        parts = lines[i].split() if i < len(lines) else []
        if len(parts) != 2 or parts[0] != key:
            raise MapError(f"line {i + 1}: expected '{key} <n>'")
        return int(parts[1])

    n = header(0, "vertices")
    m = header(1, "edges")
    if len(lines) != 2 + m + n:
        raise MapError(f"expected {2 + m + n} lines, found {len(lines)}")
    edges = []
    for k in range(m):
        parts = lines[2 + k].split()
        if len(parts) != 4 or parts[0] != "edge":
            raise MapError(f"line {3 + k}: malformed edge line")
        i, u, v = map(int, parts[1:])
        if i != k:
            raise MapError(f"line {3 + k}: edge {i} out of order or duplicated (expected {k})")
        edges.append((u, v))
    graph = Graph(n, edges)
    rotations: dict[int, list[int]] = {}
    for k in range(n):
        head, _, rest = lines[2 + m + k].partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "rotation":
            raise MapError(f"line {3 + m + k}: malformed rotation line")
        v = int(parts[1])
        if v in rotations or not 0 <= v < n:
            raise MapError(f"line {3 + m + k}: duplicate or invalid rotation for vertex {v}")
        rotations[v] = [int(x) for x in rest.split()]
    if len(rotations) != n:
        raise MapError("missing rotation lines")
    return CombinatorialMap.from_rotations(graph, [rotations[v] for v in range(n)])


def read_cmap(path) -> CombinatorialMap:
    with open(path, encoding="utf-8") as fh:
        return parse_cmap(fh.read())


def write_cmap(cmap: CombinatorialMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_cmap(cmap))
