"""Acceptance criteria, each at its stated tolerance (all exact).

Every test registers one PASS/FAIL line, printed in the terminal summary
under "acceptance criteria".
"""
import itertools
import logging
import random
import time
from fractions import Fraction as F
from math import factorial

import pytest

from conftest import cached_random, cached_special, record
from tverdeg.degree import (
    NonGenericRay,
    check_pseudomanifold,
    combinatorial_sign,
    compute_degree,
    degree,
    geometric_sign,
    sample_ray,
)
from tverdeg.exact import affinely_independent
from tverdeg.experiments import (
    ResidueMismatch,
    motion_scan,
    search_degree_zero,
    tverberg_census,
)
from tverdeg.geometry import CollectionGeometry
from tverdeg.model import apply_permutation, classes_of, enumerate_partitions, parity
from tverdeg.transform import (
    RPartition,
    affine_tverberg_direct,
    affinely_dependent_direct,
    affinely_dependent_transform,
    has_affine_tverberg_point,
    has_tverberg_direction,
    has_tverberg_point,
    in_convex_hull,
    origin_in_hull,
    transform_partition,
    tverberg_point_from_transform,
)

SPECIAL_GRID = [(1, 2, 1), (1, 3, 4), (2, 3, 8), (3, 3, 16), (2, 4, 216)]


def random_partition_suite(count=1000, seed=2024):
    """Partitions with d <= 3, r <= 4 and distinct integer points in [0, 20]^d.

    Sizes run from r to (d+1)(r-1)+2.  Half the partitions draw from the
    small box [0, 4]^d, which makes collinear and coplanar classes common.
    """
    rng = random.Random(seed)
    suite = []
    for _ in range(count):
        d = rng.randint(1, 3)
        r = rng.randint(2, 4)
        n = rng.randint(r, (d + 1) * (r - 1) + 2)
        hi = 4 if rng.random() < 0.5 and 5**d >= n else 20
        pts = set()
        while len(pts) < n:
            pts.add(tuple(F(rng.randint(0, hi)) for _ in range(d)))
        labels = [i % r for i in range(n)]
        rng.shuffle(labels)
        suite.append(RPartition(r, tuple(pts), tuple(labels)))
    return suite


SUITE = random_partition_suite()


@pytest.mark.parametrize("d, r, expected", SPECIAL_GRID)
def test_special_configuration_degree(d, r, expected):
    c = cached_special(d, r)
    start = time.perf_counter()
    rep = compute_degree(c, threads=1)
    elapsed = time.perf_counter() - start
    limit = 30.0 if r == 4 else 1.0
    record(
        f"special-degree (d={d}, r={r})",
        abs(rep.degree) == expected and elapsed < limit,
        f"|deg| = {abs(rep.degree)}, expected {expected}, {elapsed:.2f}s single-threaded (budget {limit:.0f}s)",
    )


@pytest.mark.parametrize("d, r, expected", SPECIAL_GRID)
def test_special_configuration_census(d, r, expected):
    c = cached_special(d, r)
    census = tverberg_census(c)
    z_alone = all(classes_of(p, c)[-1] == frozenset({c.n}) for p in census.placements)
    record(
        f"special-census (d={d}, r={r})",
        len(census.tverberg) == factorial(r - 1) ** (d + 1) and z_alone,
        f"{len(census.tverberg)} Tverberg placements, expected {factorial(r - 1) ** (d + 1)}, "
        f"all with last class {{z}}: {z_alone}",
    )


def test_sarkaria_onn_equivalence():
    disagreements = 0
    bad_witness = 0
    positives = 0
    for p in SUITE:
        direct, _ = has_tverberg_point(p)
        ok, alpha = origin_in_hull(transform_partition(p))
        if direct != ok:
            disagreements += 1
        if ok:
            positives += 1
            x = tverberg_point_from_transform(p, alpha)
            if not all(in_convex_hull(x, cl) for cl in p.classes):
                bad_witness += 1
    record(
        "sarkaria-onn equivalence (1000 partitions)",
        disagreements == 0 and bad_witness == 0,
        f"{disagreements} disagreements, {bad_witness} invalid witnesses, {positives} Tverberg cases",
    )


def test_dictionary_equivalences():
    bad_i = bad_ii = 0
    pos_i = pos_ii = 0
    for p in SUITE:
        a = has_affine_tverberg_point(p)
        b = affine_tverberg_direct(p)
        bad_i += a != b
        pos_i += a
        t = affinely_dependent_transform(p)
        s = any(not affinely_independent(cl) for cl in p.classes) or has_tverberg_direction(p)
        bad_ii += t != s or t != affinely_dependent_direct(p)
        pos_ii += t
    record(
        "dictionary (i) and (ii) (1000 partitions)",
        bad_i == 0 and bad_ii == 0,
        f"(i): {bad_i} disagreements ({pos_i} true); (ii): {bad_ii} disagreements ({pos_ii} true)",
    )


@pytest.mark.parametrize("d, r", [(2, 3), (2, 4)])
def test_pseudomanifold(d, r):
    start = time.perf_counter()
    problems = check_pseudomanifold(d, r)
    record(
        f"pseudomanifold (d={d}, r={r})",
        problems == [],
        f"{len(problems)} problems over {factorial(r) ** (d + 1)} placements x {(d + 1) * (r - 1)} ridges, "
        f"{time.perf_counter() - start:.1f}s",
    )


def test_permutation_law():
    failures = 0
    checks = 0
    perms = list(itertools.permutations(range(3)))
    for seed in range(20):
        c = cached_random(2, 3, seed)
        g = CollectionGeometry(c)
        for p in enumerate_partitions(2, 3):
            cs, gs = combinatorial_sign(p), geometric_sign(p, c, geometry=g)
            for pi in perms:
                q = apply_permutation(p, pi)
                factor = parity(pi) ** 3
                checks += 1
                if combinatorial_sign(q) != factor * cs or geometric_sign(q, c, geometry=g) != factor * gs:
                    failures += 1
    record(
        "permutation law (20 collections x 216 x 6)",
        failures == 0,
        f"{failures} failures in {checks} checks",
    )


def test_ray_invariance():
    spread = []
    resampled = 0
    for seed in range(20):
        c = cached_random(2, 3, seed)
        rng = random.Random(f"rays:{seed}")
        degrees = set()
        got = 0
        while got < 10:
            try:
                degrees.add(degree(c, sample_ray(rng, c.n)).degree)
                got += 1
            except NonGenericRay:
                resampled += 1
        spread.append(len(degrees))
    record(
        "ray invariance (20 collections x 10 rays)",
        all(s == 1 for s in spread),
        f"collections with more than one degree: {sum(s > 1 for s in spread)}, non-generic draws {resampled}",
    )


def test_residue_invariance_r3():
    degrees = [compute_degree(cached_random(2, 3, seed)).degree for seed in range(100)]
    bad = [x for x in degrees if x % 6 != 2]
    record(
        "residue r=3 (100 collections, 2 mod 6)",
        not bad,
        f"degrees seen {sorted(set(degrees))}, off-residue {len(bad)}",
    )


def test_residue_invariance_r4():
    degrees = [compute_degree(cached_random(2, 4, seed)).degree for seed in range(30)]
    bad = [x for x in degrees if x % 24 != 0]
    record(
        "residue r=4 (30 collections, 0 mod 24)",
        not bad,
        f"degrees seen {sorted(set(degrees))}, off-residue {len(bad)}",
    )


def test_degree_zero_search(caplog):
    caplog.set_level(logging.WARNING)
    start = time.perf_counter()
    log = search_degree_zero(2, 4, budget=10**4, seed=0, stop_after=1)
    detail = (
        f"{len(log.found)} find(s) after {log.trials} trials, {time.perf_counter() - start:.1f}s; "
        f"census sizes {[len(f.census.tverberg) for f in log.found]}; alarms {log.alarms}"
    )
    for find in log.found:
        assert find.report.degree == 0
    record("degree-zero search (d=2, r=4, budget 10^4)", len(log.found) >= 1, detail)


def test_prime_r_existence():
    empty = mismatched = 0
    for seed in range(100):
        c = cached_random(2, 3, seed)
        census = {p for p in tverberg_census(c).placements}
        hits = {p for p, _, _ in degree(c).hits}
        empty += not census
        mismatched += census != hits
    record(
        "prime-r existence (100 collections, census = rho-hits)",
        empty == 0 and mismatched == 0,
        f"{empty} empty censuses, {mismatched} census/hit mismatches",
    )


@pytest.mark.parametrize("r", [3, 4])
def test_motion_scans(r):
    residues = []
    nongeneric = 0
    distinct = set()
    mismatches = []
    for k in range(5):
        try:
            trace = motion_scan(cached_special(2, r), cached_random(2, r, 100 + k), 50)
        except ResidueMismatch as exc:
            mismatches.append(str(exc))
            trace = exc.trace
        residues.append(trace.residues)
        nongeneric += sum(not s.sufficiently_general for s in trace.samples)
        distinct |= set(trace.degrees)
    ok = not mismatches and all(len(res) == 1 for res in residues) and len(set().union(*residues)) == 1
    record(
        f"motion scans (r={r}, 5 targets x 50 steps)",
        ok,
        f"residues {sorted(set().union(*residues))}, degrees seen {sorted(distinct)}, "
        f"non-generic samples {nongeneric}, mismatches {mismatches}",
    )
