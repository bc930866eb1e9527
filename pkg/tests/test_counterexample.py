import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from genus_lab.counterexample import (
    CONCAVE,
    CONVEX,
    EQUAL,
    FlipPlan,
    LimitExceeded,
    PlanError,
    family_plans,
    family_size,
    flip_embedding,
    flip_family,
    log_concavity_report,
    log_convexity_certificate,
    verify_coefficient_inequalities,
    verify_flip_family,
)
from genus_lab.families import ConstructionParams, ParameterError, counterexample_graph
from genus_lab.map_core import validate_map

from oracles import genus_of, is_log_concave_at

SMALL = ConstructionParams(6, 1, 1, 2)
TWO_ZONES = ConstructionParams(6, 2, 1, 2)


@pytest.fixture(scope="module")
def small():
    return counterexample_graph(SMALL)


@pytest.fixture(scope="module")
def two_zones():
    return counterexample_graph(TWO_ZONES)


def test_empty_plan_is_identity(small):
    cmap = flip_embedding(small, FlipPlan())
    assert cmap == small.base_map
    assert cmap.genus() == 0


def test_one_zone_raises_genus_by_two(small):
    cmap = flip_embedding(small, FlipPlan(frozenset({1})))
    assert validate_map(cmap.graph, cmap.sigma).valid
    assert cmap.genus() == 2
    assert genus_of(cmap.graph, cmap.sigma) == 2


def test_odd_extra_alone_raises_genus_by_one(small):
    cmap = flip_embedding(small, FlipPlan(frozenset(), odd_extra=1))
    assert cmap.genus() == 1


def test_plan_rejects_non_cross_edge(small):
    conn = small.zone(1)[0]
    with pytest.raises(PlanError):
        flip_embedding(small, FlipPlan(frozenset({1}), cross_flips={(1, 1): frozenset({conn.flip_edge})}))
    with pytest.raises(PlanError):
        flip_embedding(small, FlipPlan(frozenset({1}), odd_extra=1))


def test_cross_flips_keep_the_genus(small):
    zone = small.zone(1)
    flips = {(c.zone, c.index): frozenset(c.cross_edges) for c in zone}
    cmap = flip_embedding(small, FlipPlan(frozenset({1}), cross_flips=flips))
    assert cmap.genus() == 2


def test_family_sizes_follow_closed_form(small, two_zones):
    x1 = len(small.zone(1)[0].cross_edges)
    x = 3 * x1
    assert family_size(small, 0) == 1
    assert family_size(small, 1) == 2 ** x1
    assert family_size(small, 2) == 2 ** x
    assert family_size(two_zones, 3) == comb(2, 1) * 2 ** (x + x1)
    assert family_size(two_zones, 4) == 2 ** (2 * x)
    with pytest.raises(ParameterError):
        family_size(small, 3)


@pytest.mark.parametrize("r", [0, 1, 2])
def test_family_members_have_exact_genus_and_are_distinct(small, r):
    maps, size = flip_family(small, r)
    seen = set()
    for cmap in maps:
        assert cmap.genus() == r
        seen.add(cmap.sigma)
    assert len(seen) == size


def test_plans_can_start_mid_family(two_zones):
    whole = [p.describe() for p in family_plans(two_zones, 3)]
    part = [p.describe() for p in family_plans(two_zones, 3, 100, 300)]
    assert part == whole[100:300]


@pytest.mark.parametrize("params, r", [(SMALL, 1), (SMALL, 2), (TWO_ZONES, 1), (TWO_ZONES, 3)])
def test_verify_flip_family(params, r):
    report = verify_flip_family(params, r)
    assert report["passed"]
    assert report["generated"] == report["distinct"] == report["size_formula"]
    assert report["target_genus"] == r


def test_verify_odd_family_size_formula():
    report = verify_flip_family(TWO_ZONES, 3)
    x, x1 = report["cross_edges_per_zone"], report["cross_edges_connector_1"]
    assert report["size_formula"] == comb(2, 1) * 2 ** (x + x1)


def test_limit_exceeded_reports_size():
    with pytest.raises(LimitExceeded, match="limit exceeded") as info:
        verify_flip_family(ConstructionParams(9, 1, 1, 3), 2, limit=1)
    assert info.value.requested == 4096


def test_verify_checkpoint_resume_is_identical(tmp_path):
    plain = verify_flip_family(TWO_ZONES, 3)
    path = tmp_path / "flip.json"
    assert verify_flip_family(TWO_ZONES, 3, checkpoint=path, chunk_size=100, max_chunks=2) is None
    resumed = verify_flip_family(TWO_ZONES, 3, checkpoint=path, chunk_size=100)
    assert resumed == plain


def test_verify_with_workers_is_identical():
    assert verify_flip_family(TWO_ZONES, 3, workers=2) == verify_flip_family(TWO_ZONES, 3)


# log-concavity


def test_report_examples():
    assert log_concavity_report([1, 2, 4]).classes == (EQUAL,)
    assert log_concavity_report([2, 16, 4096]).classes == (CONVEX,)
    assert log_concavity_report([1, 3, 9, 26]).classes[1] == CONCAVE
    with pytest.raises(ValueError):
        log_concavity_report([1, -1, 2])


def test_report_unimodality():
    assert log_concavity_report([1, 3, 3, 2]).unimodal
    assert not log_concavity_report([3, 1, 3]).unimodal
    assert log_concavity_report([]).unimodal


def test_report_big_integers():
    a = 10**60
    report = log_concavity_report([a, a * 3, a * 9 + 1])
    assert report.classes == (CONVEX,)
    d = report.to_dict()
    assert d["sequence"] == [str(a), str(3 * a), str(9 * a + 1)]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**30), st.fractions(min_value=0, max_value=50), st.integers(3, 12))
def test_constant_and_geometric_sequences_are_all_equality(start, ratio, n):
    ratio = Fraction(ratio)
    scale = ratio.denominator ** n
    seq = [start * scale * ratio.numerator ** i // ratio.denominator ** i for i in range(n)]
    assert all(c == EQUAL for c in log_concavity_report(seq).classes)
    assert all(c == EQUAL for c in log_concavity_report([start] * n).classes)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 2**200), min_size=0, max_size=12))
def test_classification_matches_definition(seq):
    report = log_concavity_report(seq)
    for i, cls in enumerate(report.classes, 1):
        sign = is_log_concave_at(seq, i)
        assert cls == {1: CONCAVE, -1: CONVEX, 0: EQUAL}[sign]
    assert report.log_concave == all(is_log_concave_at(seq, i) >= 0 for i in range(1, len(seq) - 1))


# coefficient inequalities and certificate


def test_coefficient_inequalities():
    assert verify_coefficient_inequalities(1)["passed"]
    report = verify_coefficient_inequalities(100)
    assert report["passed"] and report["violations"] == []
    assert report["checked"] > 100_000


def test_certificate_examples():
    tiny = log_convexity_certificate(0, 2, 10, 100, 1)
    assert tiny["length_condition_holds"] is False
    assert tiny["log_convexity_forced"] is False
    big = log_convexity_certificate(0, 2, 10**6, 10**6, 1)
    assert big["length_condition_holds"] and big["log_convexity_forced"]


def test_certificate_argument_checks():
    with pytest.raises(ParameterError):
        log_convexity_certificate(0, 2, 10**6, 10**6, 2)
    with pytest.raises(ParameterError):
        log_convexity_certificate(0, 2, 10**6, 10**6, 5)
    with pytest.raises(ParameterError):
        log_convexity_certificate(0, 2, 10**6, 0, 1)


def test_certificate_threshold_is_sharp():
    """Find the least d that passes and check its neighbour fails, exactly."""
    k, nu = 1, 50
    lo, hi = 1, 10**6
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_convexity_certificate(0, k, mid, nu, 1)["length_condition_holds"]:
            hi = mid
        else:
            lo = mid
    assert log_convexity_certificate(0, k, hi, nu, 1)["length_condition_holds"]
    assert not log_convexity_certificate(0, k, lo, nu, 1)["length_condition_holds"]
    import math
    bound = 36 * (math.log2(hi) + 7) + 2 * (217 + math.log2(nu))
    assert abs(hi - bound) < 2


def test_certificate_random_sweep():
    rng = random.Random(0)
    for _ in range(300):
        k = rng.randint(1, 6)
        r = rng.randrange(1, 2 * k, 2)
        d = rng.choice([rng.randint(1, 10**4), rng.randint(1, 10**9)])
        cert = log_convexity_certificate(rng.randint(0, 5), k, d, rng.randint(1, 10**8), r)
        if cert["length_condition_holds"]:
            assert cert["log_convexity_forced"]
