"""Flip families, log-concavity analysis and parameter certificates.

A *flip* reseats a ladder chord so that it leaves each rail vertex through
the big face on that rail's side instead of through the ladder strip.  At a
vertex several flipped chords are placed in the big-face corner in the
reverse of their strip order, i.e. mirrored across the rail.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterator, Sequence

import mpmath

from .families import (
    Construction,
    ConstructionParams,
    Connector,
    ParameterError,
    c_coefficient,
    counterexample_graph,
)
from .map_core import CombinatorialMap


class PlanError(ValueError):
    pass


class LimitExceeded(RuntimeError):
    def __init__(self, requested: int, limit: int):
        super().__init__(f"limit exceeded: family has {requested} members, limit is {limit}")
        self.requested = requested
        self.limit = limit


# --------------------------------------------------------------------------
# Flip plans
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FlipPlan:
    """Zones merged in full, an optional half-merged zone, and the chosen cross flips.

    ``cross_flips`` maps ``(zone, connector index)`` to the cross edges that
    are reseated on that connector.
    """

    zones: frozenset = frozenset()
    odd_extra: int | None = None
    cross_flips: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "zones", frozenset(self.zones))
        object.__setattr__(self, "cross_flips", {k: frozenset(v) for k, v in self.cross_flips.items() if v})

    @property
    def genus_increase(self) -> int:
        return 2 * len(self.zones) + (self.odd_extra is not None)

    def active_connectors(self, construction: Construction) -> list[Connector]:
        """Connectors whose chords may be reseated under this plan."""
        out = []
        for c in construction.connectors:
            if c.zone in self.zones or (c.zone == self.odd_extra and c.index == 1):
                out.append(c)
        return out

    def flipped_edges(self, construction: Construction) -> dict[tuple[int, int], set[int]]:
        flips: dict[tuple[int, int], set[int]] = {}
        for c in construction.connectors:
            key = (c.zone, c.index)
            if (c.zone in self.zones and c.index in (1, 2)) or (c.zone == self.odd_extra and c.index == 1):
                flips.setdefault(key, set()).add(c.flip_edge)
        for key, edges in self.cross_flips.items():
            flips.setdefault(key, set()).update(edges)
        return flips

    def describe(self) -> dict:
        return {
            "zones": sorted(self.zones),
            "odd_extra": self.odd_extra,
            "cross_flips": {f"{z}.{i}": sorted(es) for (z, i), es in sorted(self.cross_flips.items())},
        }


def _check_plan(construction: Construction, plan: FlipPlan) -> None:
    k = construction.zone_count
    if any(not 1 <= z <= k for z in plan.zones):
        raise PlanError("plan references a zone that does not exist")
    if plan.odd_extra is not None and (plan.odd_extra in plan.zones or not 1 <= plan.odd_extra <= k):
        raise PlanError("odd_extra must be an unused zone")
    active = {(c.zone, c.index): c for c in plan.active_connectors(construction)}
    for key, edges in plan.cross_flips.items():
        conn = active.get(key)
        if conn is None:
            raise PlanError(f"connector {key} is not active in this plan")
        bad = set(edges) - set(conn.cross_edges)
        if bad:
            raise PlanError(f"plan references a non-cross edge: {sorted(bad)}")


def _corner_tables(construction: Construction):
    """Per rail vertex: its rotation in the base map listed from the big-face exit dart."""
    pi0 = construction.base_map
    g = construction.graph
    faces = pi0.faces()
    face_of = pi0.face_index()
    by_vertices = {}
    for i, f in enumerate(faces):
        by_vertices.setdefault(tuple(sorted(pi0.face_vertices(f))), i)
    tables = {}
    for conn in construction.connectors:
        for rail, walk in ((conn.u, conn.left_face), (conn.w, conn.right_face)):
            face = by_vertices[tuple(sorted(walk))]
            for v in rail:
                exits = [d for d in g.darts_at(v) if face_of[d] == face]
                if len(exits) != 1:
                    raise PlanError(f"vertex {v} meets its big face {len(exits)} times")
                rot = [exits[0]]
                d = pi0.sigma[exits[0]]
                while d != exits[0]:
                    rot.append(d)
                    d = pi0.sigma[d]
                tables[v] = rot
    return tables


class FlipEngine:
    """Applies flip plans to the base map of one construction."""

    def __init__(self, construction: Construction):
        self.construction = construction
        self.tables = _corner_tables(construction)

    def apply(self, plan: FlipPlan) -> CombinatorialMap:
        _check_plan(self.construction, plan)
        g = self.construction.graph
        sigma = list(self.construction.base_map.sigma)
        flipped_darts: dict[int, set[int]] = {}
        for edges in plan.flipped_edges(self.construction).values():
            for e in edges:
                for d in (2 * e, 2 * e + 1):
                    flipped_darts.setdefault(g.vertex_of(d), set()).add(d)
        for v, darts in flipped_darts.items():
            rot = self.tables[v]
            moved = [d for d in rot if d in darts]
            new = [d for d in rot if d not in darts] + moved[::-1]
            for i, d in enumerate(new):
                sigma[d] = new[(i + 1) % len(new)]
        return CombinatorialMap(g, sigma, check=False)


def flip_embedding(construction: Construction, plan: FlipPlan) -> CombinatorialMap:
    return FlipEngine(construction).apply(plan)


# --------------------------------------------------------------------------
# Flip families
# --------------------------------------------------------------------------


def _zone_choices(k: int, r: int):
    q = r // 2
    for zones in combinations(range(1, k + 1), q):
        extra = None
        if r % 2:
            extra = min(set(range(1, k + 1)) - set(zones))
        yield frozenset(zones), extra


def _check_r(construction: Construction, r: int) -> None:
    k = construction.zone_count
    if not 0 <= r <= 2 * k:
        raise ParameterError(f"r must lie in [0, {2 * k}]")


def family_size(construction: Construction, r: int) -> int:
    """C(k, q) * 2^(X q + [r odd] X1), X = cross edges per zone, X1 = on connector 1."""
    _check_r(construction, r)
    k = construction.zone_count
    if r == 0:
        return 1
    q = r // 2
    per_zone = sum(len(c.cross_edges) for c in construction.zone(1))
    first = len(construction.zone(1)[0].cross_edges)
    return comb(k, q) * 2 ** (per_zone * q + (r % 2) * first)


def family_plans(construction: Construction, r: int, start: int = 0, stop: int | None = None) -> Iterator[FlipPlan]:
    """Plans ``start .. stop - 1`` of the family: zone choice first, then a bitmask odometer over cross edges."""
    _check_r(construction, r)
    size = family_size(construction, r)
    stop = size if stop is None else min(stop, size)
    if r == 0:
        if start < stop:
            yield FlipPlan()
        return
    per_choice = size // comb(construction.zone_count, r // 2)
    for c, (zones, extra) in enumerate(_zone_choices(construction.zone_count, r)):
        lo, hi = max(start - c * per_choice, 0), min(stop - c * per_choice, per_choice)
        if lo >= hi:
            continue
        plan = FlipPlan(zones, extra)
        slots = [((c.zone, c.index), e) for c in plan.active_connectors(construction) for e in c.cross_edges]
        for mask in range(lo, hi):
            chosen: dict = {}
            for bit, (key, e) in enumerate(slots):
                if mask >> bit & 1:
                    chosen.setdefault(key, set()).add(e)
            yield FlipPlan(zones, extra, chosen)


def flip_family(construction: Construction, r: int) -> tuple[Iterator[CombinatorialMap], int]:
    """Stream of the family's maps together with its closed-form size."""
    size = family_size(construction, r)
    engine = FlipEngine(construction)
    return (engine.apply(p) for p in family_plans(construction, r)), size


def _check_chunk(args):
    params, r, start, stop = args
    construction = counterexample_graph(params)
    engine = FlipEngine(construction)
    target = construction.base_map.genus() + r
    digests = []
    bad = None
    for i, plan in enumerate(family_plans(construction, r, start, stop), start):
        cmap = engine.apply(plan)
        gen = cmap.genus()
        if gen != target and bad is None:
            bad = {"index": i, "genus": gen, "plan": plan.describe()}
        digests.append(_sigma_digest(cmap.sigma))
    return stop - start, bad, digests


def _sigma_digest(sigma: Sequence[int]) -> bytes:
    raw = b"".join(d.to_bytes(4, "little") for d in sigma)
    return hashlib.blake2b(raw, digest_size=16).digest()


def _params_dict(params: ConstructionParams) -> dict:
    return {"m": params.m, "k": params.k, "b": params.b, "d": params.d, "g": params.g}


def verify_flip_family(params: ConstructionParams, r: int, limit: int = 1 << 16, workers: int = 1,
                       checkpoint: str | os.PathLike | None = None, chunk_size: int = 4096,
                       max_chunks: int | None = None) -> dict | None:
    """Generate the whole family, face-trace every member and check distinctness and size.

    Distinctness is decided on 128-bit digests of the rotation systems:
    distinct digests prove distinct maps, and a digest collision is reported
    as a duplicate.  With ``checkpoint`` the run records progress after each
    chunk of ``chunk_size`` plans and resumes from an existing file;
    ``max_chunks`` stops early and returns ``None``.
    """
    construction = counterexample_graph(params)
    size = family_size(construction, r)
    if size > limit:
        raise LimitExceeded(size, limit)
    workers = max(1, workers)
    path = Path(checkpoint) if checkpoint is not None else None
    start, generated, first_bad, digests = 0, 0, None, []
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        if data["params"] != _params_dict(params) or data["r"] != r:
            raise ValueError(f"checkpoint {path} belongs to a different family")
        start, generated, first_bad = data["next"], data["generated"], data["first_bad"]
        digests = [bytes.fromhex(h) for h in data["digests"]]
    step = chunk_size if path is not None else size
    done = 0
    pool = None
    try:
        while start < size:
            if max_chunks is not None and done >= max_chunks:
                return None
            stop = min(size, start + step)
            pieces = max(1, workers * 4)
            bounds = [start + (stop - start) * i // pieces for i in range(pieces + 1)]
            jobs = [(params, r, lo, hi) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]
            if workers > 1:
                if pool is None:
                    from concurrent.futures import ProcessPoolExecutor

                    pool = ProcessPoolExecutor(max_workers=workers)
                results = list(pool.map(_check_chunk, jobs))
            else:
                results = [_check_chunk(job) for job in jobs]
            for n, bad, ds in results:
                generated += n
                if first_bad is None and bad is not None:
                    first_bad = bad
                digests.extend(ds)
            start = stop
            done += 1
            if path is not None:
                state = {"schema_version": 1, "params": _params_dict(params), "r": r, "next": start,
                         "generated": generated, "first_bad": first_bad, "digests": [d.hex() for d in digests]}
                tmp = path.with_suffix(path.suffix + ".tmp")
                tmp.write_text(json.dumps(state, sort_keys=True))
                os.replace(tmp, path)
    finally:
        if pool is not None:
            pool.shutdown()

    distinct = len(set(digests))
    first_dup = None
    if distinct != len(digests):
        seen: dict = {}
        for i, key in enumerate(digests):
            if key in seen:
                first_dup = [seen[key], i]
                break
            seen[key] = i
    report = {
        "params": _params_dict(params),
        "r": r,
        "q": r // 2,
        "target_genus": construction.base_map.genus() + r,
        "generated": generated,
        "distinct": distinct,
        "size_formula": size,
        "cross_edges_per_zone": sum(len(c.cross_edges) for c in construction.zone(1)),
        "cross_edges_connector_1": len(construction.zone(1)[0].cross_edges),
        "genus_ok": first_bad is None,
        "all_distinct": distinct == generated,
        "size_ok": generated == size,
    }
    report["passed"] = report["genus_ok"] and report["all_distinct"] and report["size_ok"]
    if first_bad is not None:
        report["first_bad_plan"] = first_bad
    if first_dup is not None:
        report["first_duplicate"] = first_dup
    return report


# --------------------------------------------------------------------------
# Log-concavity
# --------------------------------------------------------------------------


CONCAVE = "strictly log-concave"
CONVEX = "strictly log-convex"
EQUAL = "equality"


@dataclass(frozen=True)
class SequenceReport:
    sequence: tuple[int, ...]
    classes: tuple[str, ...]  # classes[i - 1] describes interior index i
    unimodal: bool

    def indices(self, kind: str) -> list[int]:
        return [i + 1 for i, c in enumerate(self.classes) if c == kind]

    @property
    def log_concave(self) -> bool:
        return CONVEX not in self.classes

    def to_dict(self) -> dict:
        return {
            "sequence": [str(a) for a in self.sequence],
            "terms": [{"index": i + 1, "class": c} for i, c in enumerate(self.classes)],
            "strictly_log_convex": self.indices(CONVEX),
            "log_concave": self.log_concave,
            "unimodal": self.unimodal,
        }


def _unimodal(seq: Sequence[int]) -> bool:
    i, n = 0, len(seq)
    while i + 1 < n and seq[i] <= seq[i + 1]:
        i += 1
    while i + 1 < n and seq[i] >= seq[i + 1]:
        i += 1
    return i >= n - 1


def log_concavity_report(sequence: Sequence[int]) -> SequenceReport:
    """Classify each interior term by the sign of a_i^2 - a_(i-1) a_(i+1), exactly."""
    seq = tuple(int(a) for a in sequence)
    if any(a < 0 for a in seq):
        raise ValueError("sequence has a negative entry")
    classes = []
    for i in range(1, len(seq) - 1):
        diff = seq[i] * seq[i] - seq[i - 1] * seq[i + 1]
        classes.append(CONCAVE if diff > 0 else CONVEX if diff < 0 else EQUAL)
    return SequenceReport(seq, tuple(classes), _unimodal(seq))


# --------------------------------------------------------------------------
# Coefficient inequalities
# --------------------------------------------------------------------------


def verify_coefficient_inequalities(k_max: int) -> dict:
    """Check monotonicity, convexity of q c_q and both comparison families exactly."""
    violations = []
    checked = 0
    for k in range(1, k_max + 1):
        c = {q: c_coefficient(q, k) for q in range(k, 2 * k + 1)}
        checked += 2
        if c[2 * k] != 1:
            violations.append(("c_2k", k))
        if c[k] != 1 - Fraction(3, 4 * k):
            violations.append(("c_k", k))
        for q in range(k, 2 * k):
            checked += 1
            if not c[q] < c[q + 1]:
                violations.append(("monotone", k, q))
        for q in range(k + 1, 2 * k):
            checked += 1
            if not 2 * q * c[q] < (q - 1) * c[q - 1] + (q + 1) * c[q + 1]:
                violations.append(("convex", k, q))
        for t in range(0, k):
            top = c[k + t + 1] * (k + t + 1)
            checked += 1
            if not top > c[2 * k] * (k + t):
                violations.append(("compare_full", k, t))
            for s in range(0, t):
                checked += 1
                if not top > c[k + s + 1] * (k + s) + c[2 * k] * (t - s):
                    violations.append(("compare_split", k, t, s))
    return {"k_max": k_max, "checked": checked, "violations": [list(v) for v in violations], "passed": not violations}


# --------------------------------------------------------------------------
# Log-convexity certificate
# --------------------------------------------------------------------------


def _log2_interval(x: int):
    return mpmath.iv.log(x) / mpmath.iv.log(2)


def _exact(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _compare(lhs_fn, d: int) -> bool:
    """Decide ``d > lhs`` where ``lhs_fn()`` returns an enclosing interval at the current precision."""
    prec = 64
    while prec <= 4096:
        saved, mpmath.iv.prec = mpmath.iv.prec, prec
        try:
            value = lhs_fn()
            lo, hi = _exact(value.a), _exact(value.b)
        finally:
            mpmath.iv.prec = saved
        if d > hi:
            return True
        if d <= lo:
            return False
        prec *= 2
    raise ArithmeticError("could not separate d from the bound")


def log_convexity_certificate(g: int, k: int, d: int, nu: int, r: int) -> dict:
    """Evaluate the connector-length condition on d and the log-convexity comparison at odd r.

    ``length_condition_holds``: d > 36k^2(log2 d + 7) + (g + 2k)(217 + log2 nu).
    ``log_convexity_forced``: the squared upper bound at r stays below the
    product lower bound at r - 1 and r + 1, i.e.
    (g + 2k)(31 log2 120 + log2 nu) + 36k^2 log2(108 d) < d.
    """
    if r % 2 == 0:
        raise ParameterError("r must be odd")
    if not 1 <= r < 2 * k:
        raise ParameterError("need 1 <= r < 2k")
    if nu < 1 or d < 1 or g < 0:
        raise ParameterError("need nu >= 1, d >= 1, g >= 0")

    def length_bound():
        return 36 * k * k * (_log2_interval(d) + 7) + (g + 2 * k) * (217 + _log2_interval(nu))

    def forcing_bound():
        return (g + 2 * k) * (31 * _log2_interval(120) + _log2_interval(nu)) \
            + 36 * k * k * _log2_interval(108 * d)

    holds = _compare(length_bound, d)
    forced = _compare(forcing_bound, d)
    if holds and not forced:
        raise AssertionError("length condition holds but log-convexity is not forced")
    return {
        "g": g, "k": k, "d": d, "nu": nu, "r": r,
        "length_condition_holds": holds,
        "log_convexity_forced": forced,
    }
