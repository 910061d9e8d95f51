import random
from fractions import Fraction as F

import pytest

from conftest import cached_random, cached_special
from tverdeg.degree import degree
from tverdeg.experiments import simplex_vertices
from tverdeg.genpos import (
    FACET_DEGENERATE,
    RIDGE_CONTAINS_ORIGIN,
    BudgetExceeded,
    check_almost,
    check_sufficient,
    distance,
    perturb,
)
from tverdeg.model import BmzCollection, RookPlacement, validate_collection


def coll(d, r, pts):
    return BmzCollection(d, r, tuple(tuple(F(x) for x in p) for p in pts))


def collinear_collection():
    # c_0, c_2, c_4 (one per color) on the line y = x
    return coll(2, 3, [(0, 0), (9, 2), (1, 1), (-3, 7), (2, 2), (6, -5), (4, 11)])


def ridge_collection():
    # with R = ({c0, c4}, {c2, c5}, {c1, c3, z}), dropping c4 leaves
    # {c0}, {c2, c5}, {c1, c3}: c0 = (1,1) is on both diagonals
    return coll(2, 3, [(1, 1), (0, 0), (0, 2), (2, 2), (5, 1), (2, 0), (3, 7)])


def raw_clusters(d, r):
    """Every cluster collapsed onto its vertex (not even a valid collection)."""
    pts = [v for v in simplex_vertices(d) for _ in range(r - 1)]
    pts.append(tuple(F(1, d + 1) for _ in range(d)))
    return BmzCollection(d, r, tuple(pts))


def test_collinear_violation():
    c = collinear_collection()
    for method in ("direct", "transform"):
        rep = check_sufficient(c, method=method)
        assert rep.sufficiently_general is False
        assert rep.almost_general is None
        bad = [v for v in rep.violations if v.condition == FACET_DEGENERATE]
        assert any(v.placement.boards == ((0, 1), (0, 1), (0, 1)) for v in bad)


def test_random_and_special_pass():
    for seed in range(3):
        assert check_sufficient(cached_random(2, 3, seed)).sufficiently_general
    assert check_sufficient(cached_special(2, 3)).sufficiently_general
    assert check_sufficient(cached_special(2, 4)).sufficiently_general


@pytest.mark.parametrize("d, r, seeds", [(1, 3, 3), (2, 3, 2), (1, 4, 1)])
def test_direct_matches_transform_random(d, r, seeds):
    for seed in range(seeds):
        c = cached_random(d, r, seed)
        a = check_sufficient(c, method="direct")
        b = check_sufficient(c, method="transform")
        assert a.sufficiently_general == b.sufficiently_general
        assert set(a.violations) == set(b.violations)


@pytest.mark.parametrize("make", [collinear_collection, ridge_collection])
def test_direct_matches_transform_degenerate(make):
    c = make()
    a = check_sufficient(c, method="direct")
    b = check_sufficient(c, method="transform")
    assert a.violations and set(a.violations) == set(b.violations)


def test_small_grid_degenerate_agreement():
    rng = random.Random(5)
    for _ in range(4):
        pts = set()
        while len(pts) < 7:
            pts.add((F(rng.randint(0, 3)), F(rng.randint(0, 3))))
        c = BmzCollection(2, 3, tuple(pts))
        a = check_sufficient(c, method="direct")
        b = check_sufficient(c, method="transform")
        assert set(a.violations) == set(b.violations)


def test_nonexhaustive_stops_early():
    c = collinear_collection()
    assert len(check_sufficient(c, exhaustive=False).violations) >= 1
    assert len(check_sufficient(c, exhaustive=False).violations) < len(check_sufficient(c).violations)


def test_check_almost():
    c = cached_random(2, 3, 0)
    rep = check_almost(c)
    assert rep.almost_general is True and rep.violations == []
    bad = check_almost(ridge_collection())
    assert bad.almost_general is False and bad.violations
    target = RookPlacement(2, 3, ((0, 2), (1, 2), (0, 1)))
    assert any(
        v.placement == target and v.point == 4 and v.condition == RIDGE_CONTAINS_ORIGIN for v in bad.violations
    )


def test_budget():
    with pytest.raises(BudgetExceeded):
        check_sufficient(cached_random(2, 3, 0), budget=100)


def test_perturb_general_unchanged():
    c = cached_random(2, 3, 0)
    assert perturb(c, F(1, 1000), random.Random(0)) is c


@pytest.mark.parametrize("d, r", [(1, 3), (2, 3)])
def test_perturb_raw_clusters(d, r):
    c = raw_clusters(d, r)
    assert validate_collection(c)
    eps = F(1, 100)
    out = perturb(c, eps, random.Random(1))
    assert not validate_collection(out)
    assert check_sufficient(out).sufficiently_general
    assert distance(c, out) <= eps
    # Euclidean distance bound as well
    for p, q in zip(c.points, out.points):
        assert sum((a - b) ** 2 for a, b in zip(p, q)) <= eps**2


def test_perturb_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        perturb(raw_clusters(2, 3), F(0), random.Random(0))


def test_general_position_implies_clean_degree():
    for seed in range(5):
        c = cached_random(2, 3, seed)
        assert check_sufficient(c).sufficiently_general
        for _, s, hit in degree(c).hits:
            assert s.gsgn != 0 and min(hit.barycentric) > 0


def test_integer_collections_usually_general():
    rng = random.Random(9)
    passed = {}
    for bound in (10**3, 10**6):
        ok = 0
        for _ in range(20):
            c = BmzCollection(2, 3, tuple((F(rng.randint(0, bound)), F(rng.randint(0, bound))) for _ in range(7)))
            ok += not validate_collection(c) and bool(check_sufficient(c, exhaustive=False).sufficiently_general)
        passed[bound] = ok
    assert passed[10**6] >= 18
