"""d-clusters and simple d-clusters: detection, witnesses, canonical forms, census.

A d-cluster is d distinct k-sets whose union has at most 2k elements and
whose common intersection is empty.  A simple d-cluster is the special shape
``{B, B', B_1, ..., B_{d-2}}`` with ``B & B' == {a_1..a_{d-2}}`` and
``B - B_i == {a_i}``.

The low-level helpers work on bare bitmasks so that the search and operator
modules can reuse them on link families, which are (k-1)-uniform.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from itertools import combinations, permutations, product
from typing import Iterator, Optional, Sequence, Union

from .exceptions import FamilyError, ResourceGuardError
from .ground import Family, Params, elements, from_masks, ksets, popcount, to_mask

CENSUS_BUDGET = 5_000_000


@dataclass(frozen=True)
class ClusterWitness:
    sets: tuple[int, ...]
    union_size: int

    def as_lists(self) -> list[list[int]]:
        return [list(elements(s)) for s in self.sets]

    def to_dict(self) -> dict:
        return {"sets": self.as_lists(), "union_size": self.union_size}


@dataclass(frozen=True)
class SimpleClusterWitness:
    b: int
    b_prime: int
    reducers: tuple[int, ...]
    labels: tuple[int, ...]  # 1-based a_i, aligned with reducers

    @property
    def sets(self) -> tuple[int, ...]:
        return tuple(sorted((self.b, self.b_prime) + self.reducers))

    @property
    def union_size(self) -> int:
        u = 0
        for s in self.sets:
            u |= s
        return popcount(u)

    def as_cluster(self) -> ClusterWitness:
        return ClusterWitness(self.sets, self.union_size)

    def to_dict(self) -> dict:
        return {
            "B": list(elements(self.b)),
            "B_prime": list(elements(self.b_prime)),
            "reducers": [list(elements(r)) for r in self.reducers],
            "labels": list(self.labels),
            "sets": [list(elements(s)) for s in self.sets],
            "union_size": self.union_size,
        }


Witness = Union[ClusterWitness, SimpleClusterWitness]
CanonicalCluster = tuple[tuple[int, ...], ...]


# -- raw bitmask predicates ------------------------------------------------

def cluster_masks_ok(masks: Sequence[int], k: int) -> bool:
    """Union of at most 2k elements and empty common intersection."""
    union = 0
    inter = -1
    for m in masks:
        union |= m
        inter &= m
    return inter == 0 and popcount(union) <= 2 * k


def simple_roles(masks: Sequence[int]) -> Optional[SimpleClusterWitness]:
    """Least (B, B') role assignment making ``masks`` a simple cluster.

    Candidates are tried over ordered pairs of positions in ascending mask
    order; once B and B' are fixed the reducer labels are forced.
    """
    ordered = sorted(masks)
    d = len(ordered)
    for i, b in enumerate(ordered):
        for j, bp in enumerate(ordered):
            if i == j:
                continue
            inter = b & bp
            if popcount(inter) != d - 2:
                continue
            seen = 0
            pairs = []
            for t, r in enumerate(ordered):
                if t == i or t == j:
                    continue
                diff = b & ~r
                if diff == 0 or diff & (diff - 1) or not diff & inter or diff & seen:
                    break
                seen |= diff
                pairs.append((diff.bit_length(), r))
            else:
                pairs.sort()
                return SimpleClusterWitness(
                    b=b,
                    b_prime=bp,
                    reducers=tuple(r for _, r in pairs),
                    labels=tuple(a for a, _ in pairs),
                )
    return None


def iter_cluster_indices(
    members: Sequence[int], k: int, d: int, simple: bool = False
) -> Iterator[tuple[int, ...]]:
    """Index tuples of d-clusters among ``members`` in lexicographic DFS order.

    ``k`` is the uniformity of ``members``; branches whose union already
    exceeds 2k are cut.
    """
    m = len(members)
    limit = 2 * k
    chosen: list[int] = []

    def dfs(start: int, union: int, inter: int):
        if len(chosen) == d:
            if inter:
                return
            if simple and simple_roles([members[i] for i in chosen]) is None:
                return
            yield tuple(chosen)
            return
        need = d - len(chosen)
        for i in range(start, m - need + 1):
            u = union | members[i]
            if popcount(u) > limit:
                continue
            chosen.append(i)
            yield from dfs(i + 1, u, inter & members[i])
            chosen.pop()

    yield from dfs(0, 0, -1)


# -- public operations -----------------------------------------------------

def _check_sets(sets: Sequence[int], params: Params) -> list[int]:
    sets = list(sets)
    if len(sets) != params.d:
        raise FamilyError(f"expected {params.d} sets, got {len(sets)}")
    if len(set(sets)) != len(sets):
        raise FamilyError("cluster sets must be pairwise distinct")
    full = (1 << params.n) - 1
    for s in sets:
        if s & ~full or popcount(s) != params.k:
            raise FamilyError(f"{elements(s)} is not a {params.k}-subset of [{params.n}]")
    return sets


def is_cluster(sets: Sequence[int], params: Params) -> bool:
    sets = _check_sets(sets, params)
    return cluster_masks_ok(sets, params.k)


def as_simple_cluster(sets: Sequence[int], params: Params) -> Optional[SimpleClusterWitness]:
    sets = _check_sets(sets, params)
    return simple_roles(sets)


def find_cluster(F: Family, d: int, simple_only: bool = False) -> Optional[Witness]:
    """First d-cluster (or simple d-cluster) of F in lexicographic order."""
    for idx in iter_cluster_indices(F.members, F.k, d, simple=simple_only):
        masks = [F.members[i] for i in idx]
        if simple_only:
            return simple_roles(masks)
        return ClusterWitness(tuple(masks), popcount(to_union(masks)))
    return None


def to_union(masks: Sequence[int]) -> int:
    u = 0
    for m in masks:
        u |= m
    return u


def cluster_members(F: Family, d: int, simple_only: bool = False) -> Family:
    """Sets of F that lie in at least one d-cluster inside F."""
    hit = set()
    for idx in iter_cluster_indices(F.members, F.k, d, simple=simple_only):
        hit.update(idx)
    return Family(F.params, tuple(F.members[i] for i in sorted(hit)))


# -- canonical forms -------------------------------------------------------

def _as_masks(w) -> list[int]:
    if isinstance(w, (ClusterWitness, SimpleClusterWitness)):
        return list(w.sets)
    return list(w)


@lru_cache(maxsize=65536)
def _canonical_from_patterns(patterns: tuple[tuple[tuple[int, ...], int], ...], d: int) -> CanonicalCluster:
    best = None
    for perm in permutations(range(d)):
        # Elements are labeled in decreasing order of their membership vector
        # under this set ordering; equal vectors are interchangeable.
        keyed = sorted(
            ((tuple(pat[p] for p in perm), count) for pat, count in patterns),
            reverse=True,
        )
        blocks = [[] for _ in range(d)]
        nxt = 1
        for vec, count in keyed:
            labels = range(nxt, nxt + count)
            nxt += count
            for j in range(d):
                if vec[j]:
                    blocks[j].extend(labels)
        cand = tuple(sorted(tuple(b) for b in blocks))
        if best is None or cand < best:
            best = cand
    return best


def canonicalize(w) -> CanonicalCluster:
    """Minimal relabeling of a set collection over its support [1, u].

    The minimum over all support permutations is always attained by giving
    labels in decreasing order of membership vector with respect to some
    ordering of the sets, so only the d! set orderings are scanned.  The
    result depends only on how many elements carry each membership vector.
    """
    masks = _as_masks(w)
    union = to_union(masks)
    counts = Counter(
        tuple(s >> e & 1 for s in masks)
        for e in range(union.bit_length())
        if union >> e & 1
    )
    if not masks:
        return ()
    return _canonical_from_patterns(tuple(sorted(counts.items())), len(masks))


def canonicalize_exhaustive(w) -> CanonicalCluster:
    """Reference canonical form by trying every permutation of the support."""
    masks = _as_masks(w)
    union = to_union(masks)
    support = [e for e in range(union.bit_length()) if union >> e & 1]
    best = None
    for perm in permutations(range(1, len(support) + 1)):
        label = dict(zip(support, perm))
        cand = tuple(sorted(
            tuple(sorted(label[e] for e in support if s >> e & 1)) for s in masks
        ))
        if best is None or cand < best:
            best = cand
    return best if best is not None else ()


# -- census ----------------------------------------------------------------

def _check_kd(k: int, d: int) -> None:
    if not 2 <= d <= k:
        raise FamilyError(f"need 2 <= d <= k, got k={k}, d={d}")


def simple_cluster_classes(k: int, d: int) -> list[CanonicalCluster]:
    """Canonical representatives of simple d-clusters of k-sets (n = 2k)."""
    _check_kd(k, d)
    n = 2 * k
    b = (1 << k) - 1  # relabel so that B = {1..k}
    outside = [1 << e for e in range(k, n)]
    classes = set()
    for labels in combinations(range(k), d - 2):
        a_mask = to_mask(e + 1 for e in labels)
        for extra in combinations(outside, k - (d - 2)):
            bp = a_mask | to_union(extra)
            for zs in product(outside, repeat=d - 2):
                reducers = [(b & ~(1 << a)) | z for a, z in zip(labels, zs)]
                classes.add(canonicalize([b, bp] + reducers))
    return sorted(classes)


def census_simple(k: int, d: int) -> int:
    return len(simple_cluster_classes(k, d))


def cluster_classes(k: int, d: int, budget: int = CENSUS_BUDGET) -> list[CanonicalCluster]:
    """Canonical representatives of all d-clusters of k-sets (n = 2k).

    Every cluster can be relabeled to contain {1..k}, so only clusters through
    that set are enumerated.
    """
    _check_kd(k, d)
    pool = ksets(2 * k, k)
    first, rest = pool[0], pool[1:]
    space = comb(len(rest), d - 1)
    if space > budget:
        raise ResourceGuardError(
            f"census over {space} candidate clusters exceeds budget {budget}"
        )
    classes = set()
    for others in combinations(rest, d - 1):
        inter = first
        for s in others:
            inter &= s
        if inter == 0:
            classes.add(canonicalize((first,) + others))
    return sorted(classes)


def census_all(k: int, d: int, budget: int = CENSUS_BUDGET) -> int:
    return len(cluster_classes(k, d, budget))


def witness_family(params: Params, w: Witness) -> Family:
    return from_masks(params, w.sets)
