"""Genus distributions by exhaustive enumeration or by sampling.

Rotation systems are indexed by a mixed-radix odometer: vertex ``v`` has
``(deg v - 1)!`` arrangements (minimal dart first, the rest in lexicographic
order) and vertex ``0`` is the most significant digit.  Shards are contiguous
index ranges, so any partition of ``[0, total)`` gives the same histogram.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Iterable

import numpy as np

from .map_core import Graph, count_faces, euler_genus

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    def __init__(self, total: int, budget: int):
        super().__init__(f"{total} rotation systems exceed the budget of {budget}; use sampling")
        self.total = total
        self.budget = budget


@dataclass(frozen=True)
class GenusDistribution:
    counts: dict  # genus -> exact count
    total: int

    @property
    def min_genus(self) -> int:
        return min(g for g, c in self.counts.items() if c)

    @property
    def max_genus(self) -> int:
        return max(g for g, c in self.counts.items() if c)

    def sequence(self) -> list[int]:
        return [self.counts.get(g, 0) for g in range(self.max_genus + 1)]

    def __getitem__(self, g: int) -> int:
        return self.counts.get(g, 0)

    def to_dict(self) -> dict:
        return {
            "counts": {str(g): str(c) for g, c in sorted(self.counts.items())},
            "total": str(self.total),
        }


def rotation_system_count(graph: Graph) -> int:
    return math.prod(math.factorial(max(deg - 1, 0)) for deg in graph.degrees())


def max_genus_bound(graph: Graph) -> int:
    return (graph.edge_count - graph.vertex_count + 1) // 2


def _arrangements(graph: Graph) -> list[list[tuple[int, ...]]]:
    out = []
    for v in range(graph.vertex_count):
        ds = graph.darts_at(v)
        if not ds:
            out.append([()])
            continue
        out.append([(ds[0],) + p for p in permutations(ds[1:])])
    return out


def _digits(index: int, radices: list[int]) -> list[int]:
    digits = [0] * len(radices)
    for v in range(len(radices) - 1, -1, -1):
        index, digits[v] = divmod(index, radices[v])
    return digits


def _install(sigma: list[int], arrangement: tuple[int, ...]) -> None:
    n = len(arrangement)
    for i in range(n - 1):
        sigma[arrangement[i]] = arrangement[i + 1]
    if n:
        sigma[arrangement[-1]] = arrangement[0]


def _range_histogram(graph: Graph, start: int, stop: int) -> Counter:
    """Histogram of genus over odometer indices ``[start, stop)``."""
    arrs = _arrangements(graph)
    radices = [len(a) for a in arrs]
    digits = _digits(start, radices)
    sigma = [0] * graph.dart_count
    for v, a in enumerate(arrs):
        _install(sigma, a[digits[v]])
    V, E = graph.vertex_count, graph.edge_count
    hist: Counter = Counter()
    last = len(radices) - 1
    for _ in range(start, stop):
        faces = count_faces(sigma) if E else 1
        hist[euler_genus(V, E, faces)] += 1
        v = last
        while v >= 0:
            digits[v] += 1
            if digits[v] < radices[v]:
                _install(sigma, arrs[v][digits[v]])
                break
            digits[v] = 0
            _install(sigma, arrs[v][0])
            v -= 1
    return hist


def _shard(args):
    graph, start, stop = args
    return _range_histogram(graph, start, stop)


def _map_ranges(graph: Graph, ranges: list[tuple[int, int]], workers: int) -> Counter:
    total: Counter = Counter()
    jobs = [(graph, lo, hi) for lo, hi in ranges if hi > lo]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_shard, jobs))
    else:
        parts = [_shard(job) for job in jobs]
    for part in parts:
        total.update(part)
    return total


def graph_fingerprint(graph: Graph) -> str:
    text = f"{graph.vertex_count};" + ";".join(f"{u},{v}" for u, v in graph.edges)
    return hashlib.sha256(text.encode()).hexdigest()


def _write_checkpoint(path: Path, graph: Graph, total: int, next_index: int, counts: Counter) -> None:
    data = {
        "schema_version": 1,
        "graph": graph_fingerprint(graph),
        "total": str(total),
        "next": str(next_index),
        "counts": {str(g): str(c) for g, c in sorted(counts.items())},
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, sort_keys=True))
    os.replace(tmp, path)


def _read_checkpoint(path: Path, graph: Graph, total: int) -> tuple[int, Counter]:
    data = json.loads(path.read_text())
    if data["graph"] != graph_fingerprint(graph) or int(data["total"]) != total:
        raise ValueError(f"checkpoint {path} belongs to a different graph")
    return int(data["next"]), Counter({int(g): int(c) for g, c in data["counts"].items()})


def exact_distribution(
    graph: Graph,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    checkpoint: str | os.PathLike | None = None,
    chunk_size: int = 1 << 16,
    max_chunks: int | None = None,
) -> GenusDistribution | None:
    """Histogram of genus over all rotation systems.

    With ``checkpoint`` the run proceeds in chunks of ``chunk_size`` indices
    and records progress after each; an existing checkpoint for the same
    graph is resumed.  ``max_chunks`` stops early (returning ``None``) so a
    run can be split across invocations.
    """
    total = rotation_system_count(graph)
    if total > budget:
        raise BudgetExceeded(total, budget)
    workers = max(1, workers)
    if checkpoint is None:
        bounds = [total * i // workers for i in range(workers + 1)]
        counts = _map_ranges(graph, list(zip(bounds, bounds[1:])), workers)
        return GenusDistribution(dict(sorted(counts.items())), total)

    path = Path(checkpoint)
    start, counts = (0, Counter())
    if path.exists():
        start, counts = _read_checkpoint(path, graph, total)
        log.info("resuming from index %d of %d", start, total)
    done = 0
    while start < total:
        if max_chunks is not None and done >= max_chunks:
            return None
        stop = min(total, start + chunk_size)
        bounds = [start + (stop - start) * i // workers for i in range(workers + 1)]
        counts.update(_map_ranges(graph, list(zip(bounds, bounds[1:])), workers))
        start = stop
        done += 1
        _write_checkpoint(path, graph, total, start, counts)
    return GenusDistribution(dict(sorted(counts.items())), total)


def min_genus(graph: Graph, budget: int = DEFAULT_BUDGET) -> int:
    """Smallest genus over all rotation systems; stops early once genus 0 is seen."""
    total = rotation_system_count(graph)
    if total > budget:
        raise BudgetExceeded(total, budget)
    best = None
    step = 4096
    for lo in range(0, total, step):
        hist = _range_histogram(graph, lo, min(total, lo + step))
        low = min(hist)
        best = low if best is None else min(best, low)
        if best == 0:
            break
    return best


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class SampledDistribution:
    samples: int
    seed: int
    counts: dict  # genus -> number of samples
    total: int    # number of rotation systems
    ci: dict = field(default_factory=dict)  # genus -> (low, high) proportion

    def proportion(self, g: int) -> float:
        return self.counts.get(g, 0) / self.samples

    def estimate(self, g: int) -> float:
        return self.proportion(g) * self.total

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "counts": {str(g): str(c) for g, c in sorted(self.counts.items())},
            "total": str(self.total),
            "ci": {str(g): [round(lo, 12), round(hi, 12)] for g, (lo, hi) in sorted(self.ci.items())},
        }


def _sample_genus(graph: Graph, seed: int, index: int) -> int:
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))
    sigma = [0] * graph.dart_count
    for v in range(graph.vertex_count):
        ds = graph.darts_at(v)
        if not ds:
            continue
        rest = [ds[i] for i in rng.permutation(len(ds) - 1) + 1] if len(ds) > 1 else []
        _install(sigma, (ds[0],) + tuple(rest))
    E = graph.edge_count
    return euler_genus(graph.vertex_count, E, count_faces(sigma) if E else 1)


def _sample_range(args):
    graph, seed, lo, hi = args
    return Counter(_sample_genus(graph, seed, i) for i in range(lo, hi))


def sampled_distribution(graph: Graph, samples: int, seed: int = 0, workers: int = 1) -> SampledDistribution:
    """Uniform rotation systems; sample ``i`` uses Philox keyed by ``seed`` at counter ``i``."""
    if samples < 1:
        raise ValueError("need at least one sample")
    bounds = [samples * i // workers for i in range(workers + 1)]
    jobs = [(graph, seed, lo, hi) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sample_range, jobs))
    else:
        parts = [_sample_range(job) for job in jobs]
    counts: Counter = Counter()
    for part in parts:
        counts.update(part)
    ci = {g: wilson_interval(c, samples) for g, c in counts.items()}
    return SampledDistribution(samples, seed, dict(sorted(counts.items())), rotation_system_count(graph), ci)


def iter_rotation_systems(graph: Graph, start: int = 0, stop: int | None = None) -> Iterable[list[int]]:
    """Yield ``sigma`` lists in odometer order (the same list object, mutated in place)."""
    arrs = _arrangements(graph)
    radices = [len(a) for a in arrs]
    total = math.prod(radices)
    stop = total if stop is None else min(stop, total)
    digits = _digits(start, radices)
    sigma = [0] * graph.dart_count
    for v, a in enumerate(arrs):
        _install(sigma, a[digits[v]])
    last = len(radices) - 1
    for _ in range(start, stop):
        yield sigma
        v = last
        while v >= 0:
            digits[v] += 1
            if digits[v] < radices[v]:
                _install(sigma, arrs[v][digits[v]])
                break
            digits[v] = 0
            _install(sigma, arrs[v][0])
            v -= 1
