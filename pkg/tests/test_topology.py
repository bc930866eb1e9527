import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from genus_lab.counterexample import FlipPlan, flip_embedding
from genus_lab.families import (
    ConstructionParams,
    bouquet_interleaved,
    complete_graph,
    cylinder_graph,
    disk_filler,
    k4,
    octahedron,
    torus_grid,
)
from genus_lab.lemmas import flip_map_genus2, largest_nonhomotopic_family, petersen_graph, simple_cycles
from genus_lab.map_core import CombinatorialMap, Cycle, Graph
from genus_lab.topology import (
    TopologyError,
    cofacial_sparsity,
    face_width,
    freely_homotopic_disjoint,
    is_contractible,
    is_facial,
    is_induced,
    is_peripheral_cycle,
    is_peripheral_family,
    is_surface_separating,
    radial_map,
    shortest_noncontractible_cycle,
    vertex_connectivity,
)

from oracles import dual_contractible, dual_separating, random_connected_graph, random_rotation


def _oct():
    g, cmap = octahedron()
    return g, cmap


def _equator(g):
    # a 4-cycle avoiding an antipodal (nonadjacent) pair
    adj = g.adjacency()
    v = 0
    (far,) = [w for w in range(g.vertex_count) if w != v and w not in adj[v]]
    ring = sorted(set(range(g.vertex_count)) - {v, far})
    a = ring[0]
    (opp,) = [w for w in ring if w != a and w not in adj[a]]
    b, c = [w for w in ring if w not in (a, opp)]
    return Cycle.from_vertices(g, [a, b, opp, c])


def test_facial_triangles_and_equator():
    g, cmap = _oct()
    tri = Cycle(cmap.faces()[0])
    assert is_facial(cmap, tri)
    assert is_facial(cmap, tri.reversed())
    assert not is_facial(cmap, _equator(g))


def test_peripheral_cycles_of_octahedron():
    g, cmap = _oct()
    assert is_peripheral_cycle(g, Cycle(cmap.faces()[0]))
    eq = _equator(g)
    assert is_induced(g, eq)
    assert not is_peripheral_cycle(g, eq)


def test_hamilton_cycle_of_k5_has_chords():
    g = complete_graph(5)
    assert not is_peripheral_cycle(g, Cycle.from_vertices(g, [0, 1, 2, 3, 4]))


def test_empty_complement_counts_as_connected():
    g, _ = k4()
    g3 = Graph(3, [(0, 1), (1, 2), (2, 0)])
    assert is_peripheral_cycle(g3, Cycle.from_vertices(g3, [0, 1, 2]))


def test_peripheral_family_cases():
    g, cmap = _oct()
    t = Cycle(cmap.faces()[0])
    assert is_peripheral_family(g, [t])
    share = [Cycle(f) for f in cmap.faces() if set(cmap.face_vertices(f)) & set(t.vertices(g))
             and f != cmap.faces()[0]][0]
    assert not is_peripheral_family(g, [t, share])
    # opposite faces are disjoint but every vertex of one is adjacent to the other
    verts = set(t.vertices(g))
    (opp,) = [Cycle(f) for f in cmap.faces() if not set(cmap.face_vertices(f)) & verts]
    adj = g.adjacency()
    assert any(adj[v] & set(opp.vertices(g)) for v in verts)  # hand check of adjacency
    assert not is_peripheral_family(g, [t, opp])


def test_planar_cycles_separate_and_contract():
    g, cmap = _oct()
    for c in simple_cycles(g):
        assert is_surface_separating(cmap, c)
        assert is_contractible(cmap, c)


def test_torus_loop_is_essential():
    cmap = bouquet_interleaved()
    loop = Cycle((0,))
    assert not is_surface_separating(cmap, loop)
    assert not is_contractible(cmap, loop)


def test_facial_cycles_are_contractible():
    cmap = torus_grid(4, 4)[1]
    for f in cmap.faces():
        assert is_contractible(cmap, Cycle(f))


def test_parallel_rows_of_torus_grid_are_homotopic():
    g, cmap = torus_grid(3, 3)
    row0 = Cycle.from_vertices(g, [0, 1, 2])
    row1 = Cycle.from_vertices(g, [3, 4, 5])
    assert freely_homotopic_disjoint(cmap, row0, row1)


def test_homotopy_argument_errors():
    g, cmap = torus_grid(3, 3)
    row0 = Cycle.from_vertices(g, [0, 1, 2])
    with pytest.raises(TopologyError, match="share"):
        freely_homotopic_disjoint(cmap, row0, row0)
    face = Cycle.from_vertices(g, [0, 1, 4, 3])
    assert is_facial(cmap, face)
    row2 = Cycle.from_vertices(g, [6, 7, 8])
    with pytest.raises(TopologyError, match="contractible"):
        freely_homotopic_disjoint(cmap, face, row2)


def test_handle_curves_in_flipped_map_are_not_homotopic():
    cmap = flip_map_genus2()
    assert cmap.genus() == 2
    fam = largest_nonhomotopic_family(cmap, 5)
    assert len(fam) >= 2
    a, b = fam[:2]
    assert not freely_homotopic_disjoint(cmap, a, b)


def test_sparsity_on_octahedron():
    g, cmap = _oct()
    faces = [Cycle(f) for f in cmap.faces()]
    assert cofacial_sparsity(cmap, faces[:1]).delta == (0,)
    t = faces[0]
    neighbour = next(c for c in faces[1:] if set(c.vertices(g)) & set(t.vertices(g)))
    sp = cofacial_sparsity(cmap, [t, neighbour])
    assert all(x >= 1 for x in sp.delta)
    with pytest.raises(TopologyError):
        cofacial_sparsity(cmap, [_equator(g)])


def test_sparsity_far_triangles_in_disk_filler():
    filler = disk_filler(15)
    cmap = filler.base_map
    g = cmap.graph
    tris = [Cycle(f) for f in cmap.faces() if len(f) == 3]
    dist = dict(nx.all_pairs_shortest_path_length(nx.Graph(list(g.edges))))

    def gap(a, b):
        return min(dist[u][v] for u in a.vertices(g) for v in b.vertices(g))

    far = [(a, b) for i, a in enumerate(tris) for b in tris[i + 1:] if gap(a, b) >= 3]
    assert far
    a, b = far[0]
    sp = cofacial_sparsity(cmap, [a, b])
    assert sp.delta == (0, 0) and sp.sparse


def test_face_width_examples():
    assert face_width(bouquet_interleaved()) == 1
    assert face_width(torus_grid(3, 3)[1]) == 3
    assert face_width(torus_grid(4, 5)[1]) == 4
    with pytest.raises(TopologyError, match="genus 0"):
        face_width(octahedron()[1])


def _brute_face_width(cmap, max_len):
    radial = radial_map(cmap)
    best = None
    for c in simple_cycles(radial.graph, max_len):
        if not dual_contractible(radial, c):
            best = len(c) if best is None else min(best, len(c))
    return best // 2


@pytest.mark.parametrize("builder", [lambda: torus_grid(3, 3)[1], lambda: torus_grid(3, 4)[1], bouquet_interleaved])
def test_face_width_matches_brute_force(builder):
    cmap = builder()
    assert face_width(cmap) == _brute_face_width(cmap, 8)


def test_face_width_random_genus_one_maps_against_brute_force():
    rng = random.Random(4)
    g = k4()[0]
    checked = 0
    while checked < 6:
        cmap = CombinatorialMap(g, random_rotation(g, rng))
        if cmap.genus() == 0:
            continue
        assert face_width(cmap) == _brute_face_width(cmap, 8)
        checked += 1


def test_radial_map_preserves_genus():
    for cmap in (octahedron()[1], torus_grid(3, 3)[1], bouquet_interleaved(), flip_map_genus2()):
        radial = radial_map(cmap)
        assert radial.genus() == cmap.genus()
        assert radial.face_count == cmap.graph.edge_count


def test_shortest_noncontractible_cycle_planar_is_none():
    assert shortest_noncontractible_cycle(octahedron()[1]) is None


@pytest.mark.parametrize("graph, expected", [
    (k4()[0], 3),
    (octahedron()[0], 4),
    (complete_graph(5), 4),
    (petersen_graph(), 3),
    (cylinder_graph(ConstructionParams(6, 1, 1, 2)).graph, 4),
])
def test_vertex_connectivity(graph, expected):
    assert vertex_connectivity(graph) == (expected, True)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_vertex_connectivity_matches_networkx(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    g = random_connected_graph(rng, n, rng.randint(0, 14), loops=False)
    h = nx.Graph(list(g.edges))
    conn = vertex_connectivity(g)
    if conn.exact:
        assert conn.value == nx.node_connectivity(h)


graphs = st.builds(
    lambda seed, n, extra: random_connected_graph(random.Random(seed), n, extra),
    st.integers(0, 10**6), st.integers(2, 7), st.integers(1, 6),
)


@settings(max_examples=150, deadline=None)
@given(graphs, st.integers(0, 10**6))
def test_predicate_implications(graph, seed):
    rng = random.Random(seed)
    cmap = CombinatorialMap(graph, random_rotation(graph, rng))
    cycles = simple_cycles(graph, 7)
    if not cycles:
        return
    c = rng.choice(cycles)
    contractible = is_contractible(cmap, c)
    separating = is_surface_separating(cmap, c)
    assert separating == dual_separating(cmap, c)
    assert contractible == dual_contractible(cmap, c)
    if contractible:
        assert separating
    if is_facial(cmap, c):
        assert contractible


def test_simple_cycles_matches_networkx_count():
    for g in (complete_graph(5), octahedron()[0], petersen_graph()):
        ours = len(simple_cycles(g))
        theirs = sum(1 for c in nx.simple_cycles(nx.Graph(list(g.edges))) if len(c) >= 3)
        assert ours == theirs


def test_flip_map_from_plan():
    from genus_lab.families import counterexample_graph

    c = counterexample_graph(ConstructionParams(6, 1, 1, 2))
    assert flip_embedding(c, FlipPlan(frozenset({1}))).genus() == 2
