"""Executable property suites for the cycle lemmas, plus the self-test runner.

Each suite returns a plain report dict: ``name``, ``checked``, ``violations``
(count), ``first_violation`` (a witness or ``None``) and ``passed``.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .distribution import (
    exact_distribution,
    iter_rotation_systems,
    rotation_system_count,
)
from .families import (
    ConstructionParams,
    bouquet,
    complete_graph,
    counterexample_graph,
    cycle_graph,
    dipole,
    k4,
    octahedron,
    stacked_antiprism,
    torus_grid,
)
from .map_core import CombinatorialMap, Cycle, Graph, validate_map
from .topology import (
    cofacial_sparsity,
    freely_homotopic_disjoint,
    is_contractible,
    is_facial,
    is_peripheral_cycle,
    is_peripheral_family,
    is_surface_separating,
)


def simple_cycles(graph: Graph, max_length: int | None = None) -> list[Cycle]:
    """Every simple cycle once (up to rotation and direction), as dart sequences.

    A cycle is rooted at its smallest vertex and the walk only visits larger
    vertices, so each edge set is produced exactly twice (once per direction);
    the edge set dedupes them.
    """
    limit = max_length or graph.vertex_count
    seen = set()
    out = []

    def extend(root, path, visited):
        v = graph.head(path[-1])
        for d in graph.darts_at(v):
            if d ^ 1 == path[-1]:
                continue
            w = graph.head(d)
            if w == root:
                key = frozenset(x >> 1 for x in path + [d])
                if key not in seen and len(key) == len(path) + 1:
                    seen.add(key)
                    out.append(Cycle(tuple(path + [d])))
            elif w > root and w not in visited and len(path) + 1 < limit:
                visited.add(w)
                extend(root, path + [d], visited)
                visited.discard(w)

    for root in range(graph.vertex_count):
        for d in graph.darts_at(root):
            w = graph.head(d)
            if w == root:
                key = frozenset([d >> 1])
                if key not in seen:
                    seen.add(key)
                    out.append(Cycle((d,)))
            elif w > root and limit >= 2:
                extend(root, [d], {root, w})
    return out


def _report(name: str, checked: int, violations: list) -> dict:
    return {
        "name": name,
        "checked": checked,
        "violations": len(violations),
        "first_violation": violations[0] if violations else None,
        "passed": not violations,
    }


def _maps(graph: Graph) -> Iterable[CombinatorialMap]:
    for sigma in iter_rotation_systems(graph):
        yield CombinatorialMap(graph, list(sigma), check=False)


def _sampled_maps(graph: Graph, count: int, seed: int) -> Iterable[CombinatorialMap]:
    rng = random.Random(seed)
    for _ in range(count):
        rotations = []
        for v in range(graph.vertex_count):
            ds = list(graph.darts_at(v))
            rest = ds[1:]
            rng.shuffle(rest)
            rotations.append([ds[0]] + rest)
        yield CombinatorialMap.from_rotations(graph, rotations)


# --------------------------------------------------------------------------
# Peripheral cycles: a non-facial one never separates the surface
# --------------------------------------------------------------------------


def peripheral_cycle_suite(graph: Graph, maps: Iterable[CombinatorialMap] | None = None) -> dict:
    cycles = [c for c in simple_cycles(graph) if is_peripheral_cycle(graph, c)]
    checked, bad = 0, []
    for cmap in maps if maps is not None else _maps(graph):
        for c in cycles:
            checked += 1
            if not is_facial(cmap, c) and is_surface_separating(cmap, c):
                bad.append({"sigma": list(cmap.sigma), "cycle": list(c.vertices(graph))})
    return _report("peripheral_cycle", checked, bad)


# --------------------------------------------------------------------------
# Peripheral families: no facial member => family size <= genus
# --------------------------------------------------------------------------


def peripheral_families(graph: Graph, max_size: int = 3) -> list[tuple[Cycle, ...]]:
    cycles = [c for c in simple_cycles(graph) if is_peripheral_cycle(graph, c)]
    out = []
    for size in range(1, max_size + 1):
        for fam in combinations(cycles, size):
            if is_peripheral_family(graph, fam):
                out.append(fam)
    return out


def peripheral_family_suite(graph: Graph, maps: Iterable[CombinatorialMap] | None = None,
                            max_size: int = 3) -> dict:
    families = peripheral_families(graph, max_size)
    checked, bad = 0, []
    for cmap in maps if maps is not None else _maps(graph):
        genus = cmap.genus()
        for fam in families:
            if any(is_facial(cmap, c) for c in fam):
                continue
            checked += 1
            if len(fam) > genus:
                bad.append({"sigma": list(cmap.sigma), "family": [list(c.vertices(graph)) for c in fam]})
    return _report("peripheral_family", checked, bad)


# --------------------------------------------------------------------------
# Sparse facial families of a polyhedral map force genus
# --------------------------------------------------------------------------


def sparse_facial_families(base: CombinatorialMap, max_size: int = 3) -> list[tuple[Cycle, ...]]:
    faces = [Cycle(f) for f in base.faces()]
    out = []
    for size in range(1, max_size + 1):
        for fam in combinations(faces, size):
            if cofacial_sparsity(base, fam).sparse:
                out.append(fam)
    return out


def sparse_family_suite(base: CombinatorialMap, maps: Iterable[CombinatorialMap] | None = None,
                        max_size: int = 3) -> dict:
    graph = base.graph
    families = sparse_facial_families(base, max_size)
    checked, bad = 0, []
    for cmap in maps if maps is not None else _maps(graph):
        genus = cmap.genus()
        for fam in families:
            if any(is_facial(cmap, c) for c in fam):
                continue
            checked += 1
            if genus < len(fam):
                bad.append({"sigma": list(cmap.sigma), "family": [list(c.vertices(graph)) for c in fam]})
    return _report("sparse_family", checked, bad)


# --------------------------------------------------------------------------
# Disjoint, pairwise non-homotopic essential cycles: at most 3g - 2
# --------------------------------------------------------------------------


def largest_nonhomotopic_family(cmap: CombinatorialMap, max_length: int, stop_at: int | None = None) -> list[Cycle]:
    """Largest family of disjoint, pairwise non-homotopic, noncontractible cycles of bounded length.

    Exhaustive over cycles of length <= ``max_length``; the search stops as
    soon as a family of size ``stop_at`` is found.
    """
    graph = cmap.graph
    essential = [c for c in simple_cycles(graph, max_length) if not is_contractible(cmap, c)]
    vsets = [frozenset(c.vertices(graph)) for c in essential]
    n = len(essential)
    compatible = [set() for _ in range(n)]
    for i, j in combinations(range(n), 2):
        if vsets[i] & vsets[j]:
            continue
        if not freely_homotopic_disjoint(cmap, essential[i], essential[j]):
            compatible[i].add(j)
            compatible[j].add(i)

    best: list[int] = [0] if n else []

    def grow(chosen, candidates):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if stop_at is not None and len(best) >= stop_at:
            return
        if len(chosen) + len(candidates) <= len(best):
            return
        for i in sorted(candidates):
            grow(chosen + [i], {j for j in candidates if j > i} & compatible[i])
            if stop_at is not None and len(best) >= stop_at:
                return

    grow([], set(range(n)))
    return [essential[i] for i in best]


def nonhomotopic_suite(maps: Iterable[CombinatorialMap], max_length: int = 6) -> dict:
    checked, bad = 0, []
    for cmap in maps:
        g = cmap.genus()
        if g < 1:
            continue
        bound = 3 * g - 2
        fam = largest_nonhomotopic_family(cmap, max_length, stop_at=bound + 1)
        checked += 1
        if len(fam) > bound:
            bad.append({"sigma": list(cmap.sigma), "genus": g,
                        "family": [list(c.vertices(cmap.graph)) for c in fam]})
    return _report("nonhomotopic_bound", checked, bad)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def genus_maps(graph: Graph, genera: Sequence[int], limit: int | None = None) -> list[CombinatorialMap]:
    out = []
    for cmap in _maps(graph):
        if cmap.genus() in genera:
            out.append(CombinatorialMap(graph, list(cmap.sigma)))
            if limit is not None and len(out) >= limit:
                break
    return out


def flip_map_genus2() -> CombinatorialMap:
    from .counterexample import FlipPlan, flip_embedding

    construction = counterexample_graph(ConstructionParams(6, 1, 1, 2))
    return flip_embedding(construction, FlipPlan(frozenset({1})))


# --------------------------------------------------------------------------
# Enumerator oracle and self-test
# --------------------------------------------------------------------------


def naive_distribution(graph: Graph) -> dict[int, int]:
    """Genus histogram by brute force over every permutation at every vertex.

    Deliberately independent of the optimized enumerator: each cyclic order is
    picked out of all ``deg!`` linear orders as the one starting at the
    smallest dart, faces are walked with a dict, and genus comes from the
    Euler characteristic directly.
    """
    from itertools import permutations, product

    per_vertex = []
    for v in range(graph.vertex_count):
        ds = graph.darts_at(v)
        per_vertex.append([p for p in permutations(ds) if not ds or p[0] == min(ds)])
    hist: dict[int, int] = {}
    for choice in product(*per_vertex):
        nxt = {}
        for order in choice:
            for i, d in enumerate(order):
                nxt[d] = order[(i + 1) % len(order)]
        unseen = set(range(graph.dart_count))
        faces = 0
        while unseen:
            start = unseen.pop()
            faces += 1
            d = nxt[start ^ 1]
            while d != start:
                unseen.discard(d)
                d = nxt[d ^ 1]
        faces = max(faces, 1)
        chi = graph.vertex_count - graph.edge_count + faces
        g = (2 - chi) // 2
        hist[g] = hist.get(g, 0) + 1
    return dict(sorted(hist.items()))


def oracle_graphs() -> list[tuple[str, Graph]]:
    return (
        [(f"bouquet:{n}", bouquet(n)) for n in (1, 2, 3)]
        + [(f"dipole:{n}", dipole(n)) for n in (2, 3, 4)]
        + [(f"cycle:{n}", cycle_graph(n)[0]) for n in (3, 5)]
        + [("k4", k4()[0]), ("complete:5", complete_graph(5))]
    )


def enumerator_oracle_suite(graphs: Sequence[tuple[str, Graph]] | None = None) -> dict:
    checked, bad = 0, []
    for name, graph in graphs if graphs is not None else oracle_graphs():
        checked += 1
        fast = exact_distribution(graph)
        slow = naive_distribution(graph)
        if fast.counts != slow or fast.total != rotation_system_count(graph) or sum(slow.values()) != fast.total:
            bad.append({"graph": name, "enumerator": fast.counts, "oracle": slow})
    return _report("enumerator_oracle", checked, bad)


def validation_suite(corrupt: Callable[[list[int]], None] | None = None) -> dict:
    """Canonical maps of the built-in families pass validation; ``corrupt`` mutates each sigma first."""
    maps = [octahedron()[1], k4()[1], torus_grid(3, 3)[1], cycle_graph(4)[1],
            counterexample_graph(ConstructionParams(6, 1, 1, 2)).base_map]
    checked, bad = 0, []
    for cmap in maps:
        sigma = list(cmap.sigma)
        if corrupt is not None:
            corrupt(sigma)
        checked += 1
        report = validate_map(cmap.graph, sigma)
        if not report.valid:
            bad.append({"reason": report.reason})
    return _report("map_validation", checked, bad)


def duplicate_first_dart(sigma: list[int]) -> None:
    """Fault injection: make sigma non-injective."""
    sigma[0] = sigma[1]


FAULTS = {"sigma": duplicate_first_dart}


def selftest(fault: str | None = None, quick: bool = False) -> dict:
    """Run every suite; ``quick`` swaps the exhaustive octahedron sweeps for the first 4096 maps."""
    from .counterexample import verify_coefficient_inequalities

    oct_graph, oct_map = octahedron()
    k4_graph = k4()[0]
    stop = 4096 if quick else None

    def oct_maps():
        for sigma in iter_rotation_systems(oct_graph, 0, stop):
            yield CombinatorialMap(oct_graph, list(sigma), check=False)

    torus_maps = [torus_grid(p, q)[1] for p, q in ((3, 3), (3, 4), (4, 4))]
    petersen = genus_maps(petersen_graph(), (1, 2))
    suites = [
        validation_suite(FAULTS[fault] if fault else None),
        enumerator_oracle_suite(),
        peripheral_cycle_suite(oct_graph, oct_maps()),
        peripheral_cycle_suite(k4_graph),
        peripheral_family_suite(oct_graph, oct_maps()),
        peripheral_family_suite(k4_graph),
        peripheral_family_suite(stacked_antiprism(3, 2)[0], _sampled_maps(stacked_antiprism(3, 2)[0], 200, 7),
                                max_size=2),
        sparse_family_suite(oct_map, oct_maps()),
        nonhomotopic_suite(torus_maps + petersen[: 40 if quick else None] + [flip_map_genus2()], max_length=5),
    ]
    sec = verify_coefficient_inequalities(20 if quick else 100)
    suites.append(_report("coefficient_inequalities", sec["checked"], sec["violations"]))
    return {"suites": suites, "passed": all(s["passed"] for s in suites)}
