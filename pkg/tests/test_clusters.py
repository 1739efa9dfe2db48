import random

import pytest
from hypothesis import given, settings, strategies as st

from clusterforge.clusters import (
    as_simple_cluster, canonicalize, cluster_masks_ok, canonicalize_exhaustive, census_all,
    census_simple, cluster_classes, cluster_members, find_cluster, is_cluster,
    iter_cluster_indices, simple_cluster_classes,
)
from clusterforge.exceptions import FamilyError, ResourceGuardError
from clusterforge.ground import Params, elements, from_masks, full_family, kset, ksets, make_family, star

from conftest import clusters_bf, is_simple_bf, as_sets


def S(n, k, *sets):
    return [kset(s, n, k) for s in sets]


@pytest.mark.parametrize("n,k,d,sets,expected", [
    (4, 2, 2, [[1, 2], [3, 4]], True),
    (5, 3, 3, [[1, 2, 3], [1, 2, 4], [1, 2, 5]], False),
])
def test_is_cluster_examples(n, k, d, sets, expected):
    assert is_cluster(S(n, k, *sets), Params(n, k, d)) is expected


def test_three_disjoint_pairs_not_a_cluster():
    # d > k is outside Params, so use the raw predicate
    assert not cluster_masks_ok(S(6, 2, [1, 2], [3, 4], [5, 6]), 2)


def test_is_cluster_rejects_bad_input():
    p = Params(5, 2, 2)
    with pytest.raises(FamilyError):
        is_cluster(S(5, 2, [1, 2]), p)
    with pytest.raises(FamilyError):
        is_cluster(S(5, 2, [1, 2], [1, 2]), p)


def test_simple_witness_roles():
    w = as_simple_cluster(S(7, 3, [1, 2, 3], [1, 4, 5], [2, 3, 6]), Params(7, 3, 3))
    assert w is not None
    assert elements(w.b) == (1, 2, 3) and elements(w.b_prime) == (1, 4, 5)
    assert [elements(r) for r in w.reducers] == [(2, 3, 6)]
    assert list(w.labels) == [1]


def test_simple_two_cluster_is_disjoint_pair():
    w = as_simple_cluster(S(4, 2, [1, 2], [3, 4]), Params(4, 2, 2))
    assert w is not None and list(w.labels) == []


def test_simple_rejects_large_intersection():
    assert as_simple_cluster(S(5, 3, [1, 2, 3], [1, 2, 4], [1, 2, 5]), Params(5, 3, 3)) is None


def test_find_cluster_examples():
    assert find_cluster(star(Params(6, 3, 3), 1), 3) is None
    w = find_cluster(full_family(Params(4, 2)), 2)
    assert [list(elements(s)) for s in w.sets] == [[1, 2], [3, 4]]
    F = make_family(Params(7, 3, 3), [[1, 2, 3], [1, 4, 5], [2, 3, 6], [2, 3, 7]])
    w = find_cluster(F, 3, simple_only=True)
    assert sorted(elements(s) for s in w.sets) == [(1, 2, 3), (1, 4, 5), (2, 3, 6)]


def test_cluster_members_examples():
    p = Params(5, 2)
    assert len(cluster_members(star(p, 1), 2)) == 0
    assert len(cluster_members(full_family(p), 2)) == 10
    F = make_family(p, [[1, 2], [1, 3], [4, 5]])
    assert cluster_members(F, 2) == F


def _random_family(rng, n, k, density):
    return [m for m in ksets(n, k) if rng.random() < density]


@pytest.mark.parametrize("n,k,d", [(6, 3, 3), (7, 3, 3), (6, 2, 2), (8, 4, 3), (7, 4, 4)])
@pytest.mark.parametrize("simple", [False, True])
def test_cluster_enumeration_matches_bruteforce(n, k, d, simple):
    rng = random.Random(f"{n}{k}{d}{simple}")
    for _ in range(5):
        members = _random_family(rng, n, k, rng.uniform(0.05, 0.3))
        got = list(iter_cluster_indices(members, k, d, simple=simple))
        want = clusters_bf(members, k, d, simple=simple)
        assert sorted(got) == sorted(want)
        F = from_masks(Params(n, k, d), members)
        assert (find_cluster(F, d, simple_only=simple) is None) == (not want)
        involved = {members[i] for c in want for i in c}
        assert set(cluster_members(F, d, simple_only=simple).members) == involved


def test_canonicalize_examples():
    assert canonicalize(S(4, 2, [1, 2], [3, 4])) == ((1, 2), (3, 4))
    assert canonicalize(S(6, 2, [2, 3], [5, 6])) == ((1, 2), (3, 4))


cluster_strategy = st.integers(2, 4).flatmap(
    lambda d: st.integers(d, 4).flatmap(
        lambda k: st.lists(
            st.sampled_from(ksets(2 * k, k)), min_size=d, max_size=d, unique=True)))


@settings(max_examples=150, deadline=None)
@given(cluster_strategy, st.randoms(use_true_random=False))
def test_canonicalize_matches_exhaustive_and_is_invariant(sets, rnd):
    canon = canonicalize(sets)
    assert canon == canonicalize_exhaustive(sets)
    n = max(s.bit_length() for s in sets)
    perm = list(range(n))
    rnd.shuffle(perm)
    moved = [sum(1 << perm[i] for i in range(n) if s >> i & 1) for s in sets]
    rnd.shuffle(moved)
    assert canonicalize(moved) == canon


def test_two_simple_three_clusters_at_k4_are_distinct():
    classes = simple_cluster_classes(4, 3)
    assert len(classes) == 2 and classes[0] != classes[1]
    for c in classes:
        sets = [frozenset(b) for b in c]
        assert is_simple_bf(sets)


@pytest.mark.parametrize("k,d,count", [(4, 3, 2), (4, 4, 5), (2, 2, 1), (3, 3, 2),
                                       (5, 3, 2), (6, 3, 2), (7, 3, 2),
                                       (5, 4, 5), (6, 4, 5)])
def test_census_simple(k, d, count):
    assert census_simple(k, d) == count


def _census_bf(k, d, simple):
    """Every d-subset of ([2k] choose k), deduplicated by exhaustive canonical form."""
    from itertools import combinations
    seen = set()
    sets = ksets(2 * k, k)
    for combo in combinations(sets, d):
        fs = as_sets(combo)
        if simple:
            ok = is_simple_bf(fs)
        else:
            ok = not frozenset.intersection(*fs) and len(frozenset().union(*fs)) <= 2 * k
        if ok:
            seen.add(canonicalize_exhaustive(list(combo)))
    return len(seen)


@pytest.mark.parametrize("k,d", [(2, 2), (3, 2), (3, 3)])
def test_census_matches_bruteforce(k, d):
    assert census_all(k, d) == _census_bf(k, d, False)
    assert census_simple(k, d) == _census_bf(k, d, True)


def test_census_all_small_values():
    assert census_all(2, 2) == 1
    assert census_all(3, 3) == 3
    assert len(cluster_classes(4, 3)) == 6


def test_census_guard():
    with pytest.raises(ResourceGuardError):
        census_all(5, 5, budget=1000)
