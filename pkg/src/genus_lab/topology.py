"""Cycle predicates on embedded graphs.

Separation, contractibility and the annulus test all go through one
mechanism: cut the surface along the cycle(s), cap the boundaries, and read
the genus census of the pieces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple, Sequence

from .map_core import CombinatorialMap, Cycle, Graph, MapError, cut_components


class TopologyError(ValueError):
    pass


def _face_key(darts) -> tuple[int, ...]:
    i = min(range(len(darts)), key=lambda j: darts[j])
    return tuple(darts[i:]) + tuple(darts[:i])


def is_facial(cmap: CombinatorialMap, cycle: Cycle) -> bool:
    cycle.check(cmap.graph)
    faces = {_face_key(f) for f in cmap.faces()}
    return _face_key(cycle.darts) in faces or _face_key(cycle.reversed().darts) in faces


def is_induced(graph: Graph, cycle: Cycle) -> bool:
    verts = set(cycle.vertices(graph))
    own = set(cycle.edges())
    return not any(u in verts and v in verts and i not in own for i, (u, v) in enumerate(graph.edges))


def is_peripheral_cycle(graph: Graph, cycle: Cycle) -> bool:
    """Chordless and non-separating in the graph (an empty remainder counts as connected)."""
    cycle.check(graph)
    return is_induced(graph, cycle) and graph.is_connected(cycle.vertices(graph))


def is_peripheral_family(graph: Graph, family: Sequence[Cycle]) -> bool:
    vsets = []
    for c in family:
        c.check(graph)
        if not is_induced(graph, c):
            return False
        vsets.append(set(c.vertices(graph)))
    adj = graph.adjacency()
    for a, b in combinations(range(len(vsets)), 2):
        if vsets[a] & vsets[b]:
            return False
        if any(adj[v] & vsets[b] for v in vsets[a]):
            return False
    removed = set().union(*vsets) if vsets else set()
    return graph.is_connected(removed)


def is_surface_separating(cmap: CombinatorialMap, cycle: Cycle) -> bool:
    return len(cut_components(cmap, cycle)) == 2


def is_contractible(cmap: CombinatorialMap, cycle: Cycle) -> bool:
    """True when the cycle separates and one side caps to a sphere (bounds a disk)."""
    comps = cut_components(cmap, cycle)
    return len(comps) == 2 and min(c.genus for c in comps) == 0


def freely_homotopic_disjoint(cmap: CombinatorialMap, c1: Cycle, c2: Cycle) -> bool:
    """Homotopy test for two vertex-disjoint noncontractible cycles.

    They are freely homotopic exactly when cutting along both leaves an
    annulus: a genus-0 piece bounded by one side of each.
    """
    g = cmap.graph
    c1.check(g)
    c2.check(g)
    if set(c1.vertices(g)) & set(c2.vertices(g)):
        raise TopologyError("cycles share a vertex")
    for c in (c1, c2):
        if is_contractible(cmap, c):
            raise TopologyError("cycle is contractible")
    for comp in cut_components(cmap, c1, c2):
        sides = {tag // 2 for tag in comp.boundaries}
        if comp.genus == 0 and len(comp.boundaries) == 2 and sides == {0, 1}:
            return True
    return False


@dataclass(frozen=True)
class Sparsity:
    delta: tuple[int, ...]
    sparse: bool


def cofacial_sparsity(cmap: CombinatorialMap, family: Sequence[Cycle]) -> Sparsity:
    """Count, per member, the faces meeting it and some other member.

    Only faces linking a member to a *different* member are counted.
    """
    g = cmap.graph
    for c in family:
        if not is_facial(cmap, c):
            raise TopologyError("family member is not facial")
    vsets = [set(c.vertices(g)) for c in family]
    face_vsets = [set(cmap.face_vertices(f)) for f in cmap.faces()]
    deltas = []
    for i, vs in enumerate(vsets):
        others = set().union(*(vsets[j] for j in range(len(vsets)) if j != i)) if len(vsets) > 1 else set()
        deltas.append(sum(1 for fv in face_vsets if fv & vs and fv & others))
    return Sparsity(tuple(deltas), all(x <= 1 for x in deltas))


# --------------------------------------------------------------------------
# Face-width via the radial map
# --------------------------------------------------------------------------


def radial_map(cmap: CombinatorialMap) -> CombinatorialMap:
    """Vertex-face incidence map: one edge per corner, vertices first then faces.

    Radial edge ``x`` is the corner entered by dart ``x`` at its vertex and
    lies in the face of ``x``; its dart ``2x`` sits at the vertex, ``2x + 1``
    at the face.
    """
    g = cmap.graph
    face_of = cmap.face_index()
    V = g.vertex_count
    edges = [(g.vertex_of(x), V + face_of[x]) for x in range(g.dart_count)]
    radial = Graph(V + cmap.face_count, edges)
    sigma = [0] * (2 * g.dart_count)
    inverse_phi = [0] * g.dart_count
    for x in range(g.dart_count):
        inverse_phi[cmap.phi(x)] = x
    for x in range(g.dart_count):
        sigma[2 * x] = 2 * cmap.sigma[x]
        sigma[2 * x + 1] = 2 * inverse_phi[x] + 1
    return CombinatorialMap(radial, sigma)


def _bfs_cycles(graph: Graph, root: int):
    """Fundamental cycles of a breadth-first tree at ``root``, as dart tuples."""
    parent_dart = {root: None}
    depth = {root: 0}
    queue = deque([root])
    tree = set()
    while queue:
        v = queue.popleft()
        for d in graph.darts_at(v):
            w = graph.head(d)
            if w not in parent_dart:
                parent_dart[w] = d
                depth[w] = depth[v] + 1
                tree.add(d >> 1)
                queue.append(w)

    def path_up(v):
        out = []
        while parent_dart[v] is not None:
            out.append(parent_dart[v])
            v = graph.vertex_of(parent_dart[v])
        return out  # darts pointing down, listed bottom to top

    for e, (u, v) in enumerate(graph.edges):
        if e in tree or u not in depth or v not in depth:
            continue
        pu, pv = path_up(u), path_up(v)
        while pu and pv and pu[-1] == pv[-1]:
            pu.pop()
            pv.pop()
        darts = list(reversed(pu)) + [2 * e] + [d ^ 1 for d in pv]
        yield Cycle(tuple(darts))


def shortest_noncontractible_cycle(cmap: CombinatorialMap) -> Cycle | None:
    best = None
    g = cmap.graph
    for root in range(g.vertex_count):
        for cycle in _bfs_cycles(g, root):
            if best is not None and len(cycle) >= len(best):
                continue
            try:
                cycle.check(g)
            except MapError:
                continue
            if not is_contractible(cmap, cycle):
                best = cycle
    return best


def face_width(cmap: CombinatorialMap) -> int:
    """Fewest graph points met by a noncontractible closed curve (genus >= 1 only)."""
    if cmap.genus() == 0:
        raise TopologyError("face-width is undefined on a genus 0 map")
    cycle = shortest_noncontractible_cycle(radial_map(cmap))
    return len(cycle) // 2


# --------------------------------------------------------------------------
# Vertex connectivity
# --------------------------------------------------------------------------


class Connectivity(NamedTuple):
    value: int
    exact: bool


def vertex_connectivity(graph: Graph, max_cut: int = 5) -> Connectivity:
    """Minimum vertex cut by brute force over cuts up to ``max_cut`` vertices.

    Complete graphs give ``n - 1``.  If the minimum degree is reached without
    finding a smaller cut, the neighbourhood of a minimum-degree vertex is
    itself a cut, so the answer is exact.  Otherwise a lower bound is returned
    with ``exact=False``.
    """
    n = graph.vertex_count
    adj = graph.adjacency()
    if all(len(adj[v]) == n - 1 for v in range(n)):
        return Connectivity(n - 1, True)
    delta = min(len(a) for a in adj)
    neighbourhood_cuts = n > delta + 1
    for size in range(0, n - 1):
        if neighbourhood_cuts and size == delta:
            return Connectivity(delta, True)
        if size > max_cut:
            return Connectivity(size, False)
        for removed in combinations(range(n), size):
            if not graph.is_connected(removed):
                return Connectivity(size, True)
    return Connectivity(n - 1, True)
