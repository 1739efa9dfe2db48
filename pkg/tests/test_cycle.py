import random
from fractions import Fraction
from itertools import permutations
from math import comb, factorial

import pytest

from clusterforge.clusters import cluster_members
from clusterforge.cycle import (
    CyclicPerm, aggregate_inequality, arc_family, arcs, cycle_partition, cyclic_perms,
    incidence_count, incidence_formula, iter_cycle_claims, sample_cyclic_perms,
    verify_cycle_claims,
)
from clusterforge.exceptions import FamilyError, HypothesisViolation, ResourceGuardError
from clusterforge.ground import Params, elements, from_masks, full_family, kset, ksets, star


def arc_sets(sigma, k):
    return [sorted(elements(a)) for a in arcs(sigma, k)]


def orders_bf(n):
    """All cyclic arrangements, deduplicated by rotation, as plain tuples."""
    seen = set()
    for p in permutations(range(1, n + 1)):
        r = p.index(1)
        seen.add(p[r:] + p[:r])
    return sorted(seen)


def test_perm_normalization():
    assert CyclicPerm((3, 4, 1, 2)).order == (1, 2, 3, 4)
    with pytest.raises(FamilyError):
        CyclicPerm((1, 1, 2))


def test_cyclic_perm_count():
    for n in range(1, 8):
        perms = list(cyclic_perms(n))
        assert len(perms) == factorial(n - 1)
        assert sorted(p.order for p in perms) == orders_bf(n)


def test_guard():
    with pytest.raises(ResourceGuardError):
        next(cyclic_perms(11))


def test_sample_is_seeded():
    a = sample_cyclic_perms(12, 5, seed=3)
    assert a == sample_cyclic_perms(12, 5, seed=3)
    assert all(p.order[0] == 1 for p in a)


def test_arcs_examples():
    assert arc_sets(CyclicPerm((1, 2, 3, 4)), 2) == [[1, 2], [2, 3], [3, 4], [1, 4]]
    assert arc_sets(CyclicPerm((1, 3, 2, 4)), 2) == [[1, 3], [2, 3], [2, 4], [1, 4]]
    full = arcs(CyclicPerm((1, 3, 2, 4)), 4)
    assert len(full) == 4 and len(set(full)) == 1


def test_arc_family_examples():
    sigma = CyclicPerm((1, 2, 3, 4))
    p = Params(4, 2)
    A = arc_family(sigma, star(p, 1))
    assert sorted(sorted(elements(m)) for _, m in A.members) == [[1, 2], [1, 4]]
    assert len(arc_family(sigma, from_masks(p, []))) == 0
    assert len(arc_family(sigma, full_family(p))) == 4


@pytest.mark.parametrize("n,k,B,count", [(4, 2, [1, 2], 4), (6, 2, [1, 2], 48), (5, 4, [1, 2, 3, 4], 24)])
def test_incidence_examples(n, k, B, count):
    p = Params(n, k)
    assert incidence_count(kset(B, n, k), p) == count == incidence_formula(p)


def _contiguous(order, s):
    n = len(order)
    k = len(s)
    return any(set(order[(i + j) % n] for j in range(k)) == s for i in range(n))


@pytest.mark.parametrize("n,k", [(5, 2), (6, 3), (7, 2)])
def test_incidence_uniform_bruteforce(n, k):
    orders = orders_bf(n)
    for s in [set(elements(m)) for m in ksets(n, k)]:
        assert sum(_contiguous(o, s) for o in orders) == factorial(k) * factorial(n - k)


@pytest.mark.parametrize("n,k", [(6, 2), (6, 3), (7, 3)])
def test_arc_double_count(n, k):
    rng = random.Random(n * 10 + k)
    p = Params(n, k)
    for _ in range(5):
        G = from_masks(p, [m for m in ksets(n, k) if rng.random() < 0.4])
        total = sum(len(arc_family(s, G)) for s in cyclic_perms(n))
        assert total == len(G) * factorial(k) * factorial(n - k)


def test_claims_examples():
    p = Params(6, 2)
    S = star(p, 1)
    empty = from_masks(p, [])
    for sigma in cyclic_perms(6):
        rep = verify_cycle_claims(S, empty, sigma)
        assert rep.free_arcs <= 2 and rep.claim_ii_applies and rep.ok
    F = full_family(p)
    Fs = cluster_members(F, 2)
    assert Fs == F
    reps = list(iter_cycle_claims(F, Fs))
    assert len(reps) == 120
    assert all(r.ok and r.free_arcs == 0 and not r.claim_ii_applies for r in reps)


def test_claims_hypothesis_guard():
    p = Params(6, 2)
    F = full_family(p)
    with pytest.raises(HypothesisViolation):
        verify_cycle_claims(F, from_masks(p, []), CyclicPerm(tuple(range(1, 7))))
    with pytest.raises(HypothesisViolation):
        aggregate_inequality(star(Params(7, 4), 1), from_masks(Params(7, 4), []))


def test_partition_examples():
    p = Params(4, 2)
    empty = from_masks(p, [])
    assert cycle_partition(empty, empty).counts == (6, 0, 0)
    F = full_family(p)
    assert cycle_partition(F, F).counts[0] == 6
    assert cycle_partition(star(p, 1), empty).counts == (0, 0, 6)


def test_aggregate_star_equality():
    p = Params(5, 2)
    t = aggregate_inequality(star(p, 1), from_masks(p, []))
    assert t.objective == Fraction(10) and t.final == 10
    assert t.equality and t.ok


def test_aggregate_full_equality():
    p = Params(5, 2)
    F = full_family(p)
    Fs = cluster_members(F, 2)
    t = aggregate_inequality(F, Fs)
    assert t.equality and t.ok and t.objective == 10
    assert t.star_arc_total == len(Fs) * factorial(2) * factorial(3)


def _random_pair(rng, n, k):
    density = rng.uniform(0.05, 0.5)
    F = from_masks(Params(n, k), [m for m in ksets(n, k) if rng.random() < density])
    return F, cluster_members(F, 2)


@pytest.mark.parametrize("n,k", [(6, 2), (7, 3), (7, 2)])
def test_aggregate_random(n, k):
    rng = random.Random(f"agg{n}{k}")
    strict = 0
    for _ in range(20):
        F, Fs = _random_pair(rng, n, k)
        t = aggregate_inequality(F, Fs)
        assert t.ok
        assert t.objective <= comb(n, k)
        # objective recomputed without the trace
        assert t.objective == len(Fs) + Fraction(n, k) * (len(F) - len(Fs))
        strict += not t.equality
        assert sum(t.counts) == factorial(n - 1)
    assert strict > 0


def test_trace_json_shape():
    p = Params(6, 2)
    d = aggregate_inequality(star(p, 2), from_masks(p, [])).to_dict()
    assert d["final"] == 15 and d["equality"] is True
    assert isinstance(d["line1"], str)
