"""Exact extremal search over k-uniform families.

Three modes share one engine:

``cluster_free``
    largest family with no d-cluster;
``simple_cluster_free``
    largest family with no simple d-cluster;
``weighted``
    maximize ``k|F*| + n|F - F*|`` where ``F*`` is the set of members lying in
    some d-cluster of F (the smallest admissible choice).

All k-sets of [n] are indexed in ascending bitmask order and a family is an
int bitmask over those indices.  The forbidden d-subsets are precomputed as a
hypergraph; the search is a depth-first include/exclude branch-and-bound in
index order.  Work is split into independent root subtrees (one per smallest
member) so results do not depend on how many worker processes run them.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional

import numpy as np

from .clusters import cluster_members, iter_cluster_indices
from .exceptions import FamilyError, ParamsError, ResourceGuardError
from .ground import Family, Params, binom, elements, ksets

log = logging.getLogger(__name__)

MODES = ("cluster_free", "simple_cluster_free", "weighted")
CLASSES = ("star", "full", "other")
ORACLE_MAX_SETS = 25


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 10**9       # per root subtree
    time_limit: float = 600.0    # seconds, wall clock for the whole search


@dataclass(frozen=True)
class SearchProblem:
    params: Params
    mode: str = "cluster_free"
    budget: Budget = field(default_factory=Budget)
    force: bool = False
    max_representatives: int = 3
    census: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParamsError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.force and not self.params_valid:
            p = self.params
            raise ParamsError(
                f"parameters n={p.n}, k={p.k}, d={p.d} fail the {self.gate} condition "
                f"for mode {self.mode} (use force=True to explore anyway)"
            )

    @property
    def gate(self) -> str:
        return {
            "cluster_free": "def1_ok",
            "simple_cluster_free": "def2_ok",
            "weighted": "thm1_ok",
        }[self.mode]

    @property
    def params_valid(self) -> bool:
        return getattr(self.params, self.gate)

    @property
    def reference_bound(self) -> int:
        """The value the optimum is expected to meet."""
        n, k = self.params.n, self.params.k
        if self.mode == "weighted":
            return k * binom(n, k)
        return binom(n - 1, k - 1)


@dataclass(frozen=True)
class ExtremalClass:
    kind: str                      # star | full | other
    center: Optional[int] = None   # 1-based, stars only


@dataclass(frozen=True)
class SearchResult:
    params: Params
    mode: str
    optimum: int
    bound: int
    extremal_count: int
    census: dict
    star_centers: tuple[int, ...]
    representatives: tuple[tuple[str, Family], ...]
    exhausted: bool
    nodes: int

    @property
    def matches_bound(self) -> bool:
        return self.optimum == self.bound

    def to_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "mode": self.mode,
            "optimum": self.optimum,
            "bound": self.bound,
            "matches_bound": self.matches_bound,
            "extremal_count": self.extremal_count,
            "census": {c: self.census[c] for c in CLASSES},
            "star_centers": list(self.star_centers),
            "representatives": [
                {"class": cls, "sets": fam.as_lists()} for cls, fam in self.representatives
            ],
            "exhausted": self.exhausted,
            "nodes": self.nodes,
        }


# -- forbidden configurations ----------------------------------------------

def _simple_edges(sets: list[int], n: int, k: int, d: int) -> set[tuple[int, ...]]:
    """Index tuples of all simple d-clusters, built from their shape."""
    index = {s: i for i, s in enumerate(sets)}
    full = (1 << n) - 1
    out = set()
    for b in sets:
        outside = [1 << e for e in range(n) if not (b | ~full) >> e & 1]
        inside = [1 << e for e in range(n) if b >> e & 1]
        for labels in combinations(inside, d - 2):
            a_mask = sum(labels)
            for extra in combinations(outside, k - (d - 2)):
                bp = a_mask | sum(extra)
                for zs in product(outside, repeat=d - 2):
                    members = [b, bp] + [(b & ~a) | z for a, z in zip(labels, zs)]
                    out.add(tuple(sorted(index[m] for m in members)))
    return out


def forbidden_edges(params: Params, mode: str) -> tuple[list[int], list[tuple[int, ...]]]:
    """All k-sets and the index tuples of the forbidden d-subsets."""
    n, k, d = params.n, params.k, params.d
    sets = ksets(n, k)
    if mode == "simple_cluster_free":
        edges = sorted(_simple_edges(sets, n, k, d))
    else:
        edges = list(iter_cluster_indices(sets, k, d))
    return sets, edges


def _edge_rests(n_sets: int, edges) -> list[list[int]]:
    rests: list[list[int]] = [[] for _ in range(n_sets)]
    for e in edges:
        mask = 0
        for i in e:
            mask |= 1 << i
        for i in e:
            rests[i].append(mask & ~(1 << i))
    return rests


# -- classification --------------------------------------------------------

def _classify_mask(fmask: int, sets: list[int], n: int) -> ExtremalClass:
    n_sets = len(sets)
    if fmask == (1 << n_sets) - 1:
        return ExtremalClass("full")
    if fmask == 0:
        return ExtremalClass("other")
    common = (1 << n) - 1
    rest = fmask
    while rest:
        low = rest & -rest
        rest ^= low
        common &= sets[low.bit_length() - 1]
        if not common:
            return ExtremalClass("other")
    return ExtremalClass("star", (common & -common).bit_length())


def _family_key(fmask: int, sets: list[int]) -> tuple[int, ...]:
    out = []
    rest = fmask
    while rest:
        low = rest & -rest
        rest ^= low
        out.append(sets[low.bit_length() - 1])
    return tuple(out)


class _Tally:
    """Best value seen plus the census of families attaining it."""

    def __init__(self, best: int, sets: list[int], n: int, reps: int):
        self.best = best
        self.sets = sets
        self.n = n
        self.reps = reps
        self.count = 0
        self.census = {c: 0 for c in CLASSES}
        self.centers: set[int] = set()
        self.samples: dict[str, list[tuple[int, ...]]] = {c: [] for c in CLASSES}
        self.found = False

    def raise_to(self, value: int) -> None:
        if value > self.best or not self.found:
            self.best = value
            self.count = 0
            self.census = {c: 0 for c in CLASSES}
            self.centers = set()
            self.samples = {c: [] for c in CLASSES}
            self.found = True

    def _add(self, fmask: int) -> None:
        cls = _classify_mask(fmask, self.sets, self.n)
        self.count += 1
        self.census[cls.kind] += 1
        if cls.center is not None:
            self.centers.add(cls.center)
        bucket = self.samples[cls.kind]
        if self.reps:
            key = _family_key(fmask, self.sets)
            if len(bucket) < self.reps or key < bucket[-1]:
                bucket.append(key)
                bucket.sort()
                del bucket[self.reps:]

    def offer(self, value: int, fmask: int) -> None:
        if value < self.best:
            return
        if value > self.best or not self.found:
            self.raise_to(value)
        self._add(fmask)

    def snapshot(self) -> dict:
        return {
            "best": self.best,
            "found": self.found,
            "count": self.count,
            "census": dict(self.census),
            "centers": sorted(self.centers),
            "samples": {c: list(v) for c, v in self.samples.items()},
        }


class _BudgetExceeded(Exception):
    pass


# -- branch and bound: independence modes ----------------------------------

def _clique_cover(cand: int, adj: list[int]) -> int:
    """Greedy clique cover size of the conflict graph on ``cand``."""
    count = 0
    while cand:
        low = cand & -cand
        cand ^= low
        p = adj[low.bit_length() - 1] & cand
        while p:
            u = p & -p
            cand ^= u
            p &= adj[u.bit_length() - 1]
        count += 1
    return count


def _run_independent(task) -> dict:
    (root, n_sets, rests, sets, n, incumbent, reps, max_nodes, deadline) = task
    tally = _Tally(incumbent, sets, n, reps)
    nodes = 0

    def node(chosen, cnt, cand, adj):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes or (nodes & 0xFFF == 0 and time.monotonic() > deadline):
            raise _BudgetExceeded
        if not cand:
            tally.offer(cnt, chosen)
            return
        best = tally.best
        if cnt + cand.bit_count() < best:
            return
        if cnt + _clique_cover(cand, adj) < best:
            return
        vb = cand & -cand
        v = vb.bit_length() - 1
        inc_chosen, inc_cand, inc_adj = _include(v, vb, chosen, cand & ~vb, adj, rests)
        node(inc_chosen, cnt + 1, inc_cand, inc_adj)
        node(chosen, cnt, cand & ~vb, adj)

    exhausted = True
    base_adj = [0] * n_sets
    for v in range(n_sets):
        for rest in rests[v]:
            if not rest & (rest - 1):
                base_adj[v] |= rest
    try:
        if root is None:
            # the empty family
            tally.offer(0, 0)
        else:
            vb = 1 << root
            later = ((1 << n_sets) - 1) & ~((vb << 1) - 1)
            chosen, cand, adj = _include(root, vb, 0, later, base_adj, rests)
            node(chosen, 1, cand, adj)
    except _BudgetExceeded:
        exhausted = False
    out = tally.snapshot()
    out.update(nodes=nodes, exhausted=exhausted)
    return out


def _include(v, vb, chosen, cand, adj, rests):
    chosen |= vb
    new_adj = None
    for rest in rests[v]:
        rem = rest & ~chosen
        if not rem & (rem - 1):
            cand &= ~rem
            continue
        r2 = rem & (rem - 1)
        if r2 & (r2 - 1) or rem & cand != rem:
            continue
        if new_adj is None:
            new_adj = adj[:]
        a = rem & -rem
        b = rem ^ a
        ia, ib = a.bit_length() - 1, b.bit_length() - 1
        new_adj[ia] |= b
        new_adj[ib] |= a
    return chosen, cand, new_adj if new_adj is not None else adj


# -- branch and bound: weighted mode ---------------------------------------

def _run_weighted(task) -> dict:
    (root, n_sets, rests, sets, n, k, incumbent, reps, max_nodes, deadline) = task
    tally = _Tally(incumbent, sets, n, reps)
    nodes = 0
    all_mask = (1 << n_sets) - 1

    def node(pos, chosen, dead, doomed):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes or (nodes & 0xFFF == 0 and time.monotonic() > deadline):
            raise _BudgetExceeded
        n_dead = dead.bit_count()
        value = k * n_dead + n * (chosen.bit_count() - n_dead)
        if pos == n_sets:
            tally.offer(value, chosen)
            return
        undecided = all_mask >> pos << pos
        n_doomed = (undecided & doomed).bit_count()
        n_open = undecided.bit_count() - n_doomed
        if value + k * n_doomed + n * n_open < tally.best:
            return
        vb = 1 << pos
        new_chosen = chosen | vb
        new_dead, new_doomed = dead, doomed
        for rest in rests[pos]:
            rem = rest & ~new_chosen
            if not rem:
                new_dead |= rest | vb
            elif not rem & (rem - 1) and rem > vb:
                new_doomed |= rem
        node(pos + 1, new_chosen, new_dead, new_doomed)
        node(pos + 1, chosen, dead, doomed)

    exhausted = True
    try:
        if root is None:
            tally.offer(0, 0)
        else:
            vb = 1 << root
            doomed = 0
            for rest in rests[root]:
                if not rest & (rest - 1) and rest > vb:
                    doomed |= rest
            node(root + 1, vb, 0, doomed)
    except _BudgetExceeded:
        exhausted = False
    out = tally.snapshot()
    out.update(nodes=nodes, exhausted=exhausted)
    return out


# -- driver ----------------------------------------------------------------

def default_workers() -> int:
    env = os.environ.get("CLUSTERFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer CLUSTERFORGE_THREADS=%r", env)
    return 1


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def _incumbent(problem: SearchProblem) -> int:
    # A star is feasible in every mode, so its value is a safe lower bound.
    n, k = problem.params.n, problem.params.k
    size = binom(n - 1, k - 1)
    if problem.mode == "weighted":
        return n * size
    return size


def _merge(problem: SearchProblem, sets: list[int], parts: list[dict]) -> SearchResult:
    params = problem.params
    found = [p for p in parts if p["found"]]
    best = max(p["best"] for p in found) if found else _incumbent(problem)
    census = {c: 0 for c in CLASSES}
    centers: set[int] = set()
    samples: dict[str, list] = {c: [] for c in CLASSES}
    count = 0
    for p in found:
        if p["best"] != best:
            continue
        count += p["count"]
        for c in CLASSES:
            census[c] += p["census"][c]
            samples[c].extend(p["samples"][c])
        centers.update(p["centers"])
    reps = []
    for c in CLASSES:
        for key in sorted(samples[c])[: problem.max_representatives]:
            reps.append((c, Family(params, key)))
    return SearchResult(
        params=params,
        mode=problem.mode,
        optimum=best,
        bound=problem.reference_bound,
        extremal_count=count,
        census=census,
        star_centers=tuple(sorted(centers)),
        representatives=tuple(reps),
        exhausted=all(p["exhausted"] for p in parts),
        nodes=sum(p["nodes"] for p in parts),
    )


def _roots(problem: SearchProblem, n_sets: int) -> list:
    if not problem.census:
        # Any non-empty family can be relabeled to contain {1..k}, index 0.
        return [0]
    return [None] + list(range(n_sets))


def _check_mode(problem: SearchProblem, allowed) -> None:
    if problem.mode not in allowed:
        raise ParamsError(f"mode {problem.mode!r} not handled here; expected {allowed}")


def max_cluster_free(problem: SearchProblem, workers: Optional[int] = None) -> SearchResult:
    """Largest family with no (simple) d-cluster, with its extremal census."""
    _check_mode(problem, ("cluster_free", "simple_cluster_free"))
    workers = default_workers() if workers is None else workers
    p = problem.params
    sets, edges = forbidden_edges(p, problem.mode)
    rests = _edge_rests(len(sets), edges)
    deadline = time.monotonic() + problem.budget.time_limit
    reps = problem.max_representatives
    tasks = [
        (root, len(sets), rests, sets, p.n, _incumbent(problem), reps,
         problem.budget.max_nodes, deadline)
        for root in _roots(problem, len(sets))
    ]
    parts = _map(_run_independent, tasks, workers)
    return _merge(problem, sets, parts)


def max_weighted(problem: SearchProblem, workers: Optional[int] = None) -> SearchResult:
    """Maximize k|F*| + n|F - F*| with F* the cluster members of F."""
    _check_mode(problem, ("weighted",))
    workers = default_workers() if workers is None else workers
    p = problem.params
    sets, edges = forbidden_edges(p, "cluster_free")
    rests = _edge_rests(len(sets), edges)
    deadline = time.monotonic() + problem.budget.time_limit
    tasks = [
        (root, len(sets), rests, sets, p.n, p.k, _incumbent(problem),
         problem.max_representatives, problem.budget.max_nodes, deadline)
        for root in _roots(problem, len(sets))
    ]
    parts = _map(_run_weighted, tasks, workers)
    return _merge(problem, sets, parts)


def solve(problem: SearchProblem, workers: Optional[int] = None) -> SearchResult:
    if problem.mode == "weighted":
        return max_weighted(problem, workers)
    return max_cluster_free(problem, workers)


# -- independent oracle ----------------------------------------------------

def _oracle_edges(params: Params, mode: str) -> tuple[list[int], list[int]]:
    """Forbidden d-subsets found by checking the definitions on Python sets."""
    n, k, d = params.n, params.k, params.d
    sets = ksets(n, k)
    as_sets = [frozenset(elements(s)) for s in sets]
    edges = []
    for combo in combinations(range(len(sets)), d):
        members = [as_sets[i] for i in combo]
        if mode == "simple_cluster_free":
            bad = _is_simple_by_definition(members)
        else:
            bad = len(frozenset().union(*members)) <= 2 * k and not frozenset.intersection(*members)
        if bad:
            edges.append(sum(1 << i for i in combo))
    return sets, edges


def _is_simple_by_definition(members: list[frozenset]) -> bool:
    d = len(members)
    for bi, B in enumerate(members):
        for bpi, Bp in enumerate(members):
            if bi == bpi:
                continue
            shared = B & Bp
            if len(shared) != d - 2:
                continue
            reducers = [R for t, R in enumerate(members) if t not in (bi, bpi)]
            removed = [B - R for R in reducers]
            if all(len(r) == 1 for r in removed) and set().union(*removed, set()) == shared \
                    and len({next(iter(r)) for r in removed}) == d - 2:
                return True
    return False


def _popcount_u64(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).astype(np.int64)


def oracle_exhaustive(problem: SearchProblem, chunk_bits: int = 20) -> SearchResult:
    """Unpruned enumeration of all 2^C(n,k) families (numpy, chunked)."""
    p = problem.params
    n_sets = binom(p.n, p.k)
    if n_sets > ORACLE_MAX_SETS:
        raise ResourceGuardError(
            f"oracle would enumerate 2^{n_sets} families; limit is 2^{ORACLE_MAX_SETS}"
        )
    edge_mode = "cluster_free" if problem.mode == "weighted" else problem.mode
    sets, edges = _oracle_edges(p, edge_mode)
    total = 1 << n_sets
    step = min(total, 1 << chunk_bits)
    tally = _Tally(-1, sets, p.n, problem.max_representatives)
    best = -1
    hits: list[tuple[int, int]] = []
    for start in range(0, total, step):
        fam = np.arange(start, start + step, dtype=np.uint64)
        if problem.mode == "weighted":
            dead = np.zeros_like(fam)
            for e in edges:
                e64 = np.uint64(e)
                dead |= np.where((fam & e64) == e64, e64, np.uint64(0))
            nd = _popcount_u64(dead)
            value = p.k * nd + p.n * (_popcount_u64(fam) - nd)
        else:
            ok = np.ones(fam.shape, dtype=bool)
            for e in edges:
                e64 = np.uint64(e)
                ok &= (fam & e64) != e64
            value = np.where(ok, _popcount_u64(fam), -1)
        top = int(value.max())
        if top < best:
            continue
        if top > best:
            best = top
            hits = []
        idx = np.nonzero(value == top)[0]
        hits.extend((start + int(i), top) for i in idx)
    for fmask, v in hits:
        tally.offer(v, fmask)
    snap = tally.snapshot()
    snap.update(nodes=total, exhausted=True)
    return _merge(problem, sets, [snap])


# -- single-family helpers -------------------------------------------------

def family_value(F: Family, mode: str, d: int) -> Optional[int]:
    """Objective of F in ``mode``; None when F is infeasible for that mode."""
    if mode == "weighted":
        star = len(cluster_members(F, d))
        return F.k * star + F.n * (len(F) - star)
    simple = mode == "simple_cluster_free"
    for _ in iter_cluster_indices(F.members, F.k, d, simple=simple):
        return None
    return len(F)


def classify_extremal(F: Family, problem: SearchProblem, optimum: Optional[int] = None) -> ExtremalClass:
    """Star (with center), full, or other, for a family attaining the optimum."""
    if optimum is None:
        optimum = solve(problem).optimum
    value = family_value(F, problem.mode, problem.params.d)
    if value is None or value != optimum:
        raise FamilyError(f"family is not extremal (value {value}, optimum {optimum})")
    sets = ksets(F.n, F.k)
    index = {s: i for i, s in enumerate(sets)}
    fmask = sum(1 << index[m] for m in F.members)
    return _classify_mask(fmask, sets, F.n)
