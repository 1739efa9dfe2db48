"""Katona-style cycle machinery: cyclic orders, arc families and the double count.

A cyclic permutation of [n] is stored rotation-canonically with 1 in front,
so ``cyclic_perms(n)`` yields exactly (n-1)! representatives.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, Optional, Sequence

from .clusters import cluster_members
from .exceptions import FamilyError, HypothesisViolation, ResourceGuardError
from .ground import Family, Params, binom, elements

MAX_EXHAUSTIVE_N = 10


@dataclass(frozen=True)
class CyclicPerm:
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise FamilyError(f"{order} is not a permutation of [1, {len(order)}]")
        if order[0] != 1:
            r = order.index(1)
            order = order[r:] + order[:r]
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class ArcFamily:
    perm: CyclicPerm
    members: tuple[tuple[int, int], ...]  # (starting point, set mask)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class CyclePartition:
    counts: tuple[int, ...]  # counts[j] = #orders carrying j arcs of F - F*

    @property
    def total(self) -> int:
        return sum(self.counts)


def _guard(n: int, limit: int = MAX_EXHAUSTIVE_N) -> None:
    if n > limit:
        raise ResourceGuardError(
            f"exhaustive enumeration of {math.factorial(n - 1)} cyclic orders "
            f"(n={n}) exceeds the n <= {limit} guard"
        )


def cyclic_perms(n: int) -> Iterator[CyclicPerm]:
    _guard(n)
    for rest in permutations(range(2, n + 1)):
        yield CyclicPerm((1,) + rest)


def _orders(n: int) -> Iterator[tuple[int, ...]]:
    _guard(n)
    for rest in permutations(range(2, n + 1)):
        yield (1,) + rest


def sample_cyclic_perms(n: int, count: int, seed: int) -> list[CyclicPerm]:
    """Uniform sample (with replacement) of cyclic orders, for n past the guard."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        rest = list(range(2, n + 1))
        rng.shuffle(rest)
        out.append(CyclicPerm((1,) + tuple(rest)))
    return out


def _arc_masks(order: Sequence[int], k: int) -> list[int]:
    n = len(order)
    bits = [1 << (a - 1) for a in order]
    bits = bits + bits[: k - 1]
    out = []
    for i in range(n):
        m = 0
        for b in bits[i:i + k]:
            m |= b
        out.append(m)
    return out


def arcs(sigma: CyclicPerm, k: int) -> list[int]:
    """The n positional arcs {a_i, ..., a_{i+k-1}}; duplicates kept when k = n."""
    if not 1 <= k <= sigma.n:
        raise FamilyError(f"arc length {k} must lie in [1, {sigma.n}]")
    return _arc_masks(sigma.order, k)


def arc_family(sigma: CyclicPerm, G: Family) -> ArcFamily:
    """Members of G that are arcs of sigma, with their starting points."""
    if sigma.n != G.n:
        raise FamilyError(f"cyclic order has length {sigma.n}, family lives on [{G.n}]")
    seen = set()
    members = []
    for i, a in enumerate(arcs(sigma, G.k)):
        if a in G and a not in seen:
            seen.add(a)
            members.append((i, a))
    return ArcFamily(sigma, tuple(members))


def incidence_count(B: int, params: Params) -> int:
    """Number of cyclic orders having B as an arc (by enumeration)."""
    return sum(1 for order in _orders(params.n) if B in _arc_masks(order, params.k))


def incidence_formula(params: Params) -> int:
    return math.factorial(params.k) * math.factorial(params.n - params.k)


def check_pair_hypothesis(F: Family, Fstar: Family) -> None:
    """Every disjoint pair of F must lie in F*, and 2 <= k <= n/2."""
    if not 2 <= F.k <= F.n // 2:
        raise HypothesisViolation(f"need 2 <= k <= n/2, got n={F.n}, k={F.k}")
    if not Fstar.issubset(F):
        raise HypothesisViolation("F* must be a subfamily of F")
    bad = [m for m in cluster_members(F, 2).members if m not in Fstar]
    if bad:
        raise HypothesisViolation(
            "F has a disjoint pair with a member outside F*",
            witness=[list(elements(m)) for m in bad],
        )


@dataclass(frozen=True)
class ClaimReport:
    order: tuple[int, ...]
    free_arcs: int   # |A_sigma(F - F*)|
    star_arcs: int   # |A_sigma(F*)|
    k: int

    @property
    def claim_i(self) -> bool:
        return self.free_arcs <= self.k

    @property
    def claim_ii_applies(self) -> bool:
        return self.free_arcs > 0

    @property
    def claim_ii(self) -> bool:
        return not self.claim_ii_applies or self.star_arcs <= 2 * (self.k - self.free_arcs)

    @property
    def ok(self) -> bool:
        return self.claim_i and self.claim_ii

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "free_arcs": self.free_arcs,
            "star_arcs": self.star_arcs,
            "claim_i": self.claim_i,
            "claim_ii_applies": self.claim_ii_applies,
            "claim_ii": self.claim_ii,
        }


def _split_counts(order, k, free: frozenset, starred: frozenset) -> tuple[int, int]:
    j = s = 0
    for a in set(_arc_masks(order, k)):
        if a in free:
            j += 1
        elif a in starred:
            s += 1
    return j, s


def verify_cycle_claims(F: Family, Fstar: Family, sigma: CyclicPerm, check: bool = True) -> ClaimReport:
    if check:
        check_pair_hypothesis(F, Fstar)
    free = frozenset(F.difference(Fstar).members)
    starred = frozenset(Fstar.members)
    j, s = _split_counts(sigma.order, F.k, free, starred)
    return ClaimReport(sigma.order, j, s, F.k)


def iter_cycle_claims(F: Family, Fstar: Family, perms: Optional[Iterable[CyclicPerm]] = None) -> Iterator[ClaimReport]:
    """Claim reports over every cyclic order (or the given ones)."""
    check_pair_hypothesis(F, Fstar)
    free = frozenset(F.difference(Fstar).members)
    starred = frozenset(Fstar.members)
    orders = (p.order for p in perms) if perms is not None else _orders(F.n)
    for order in orders:
        j, s = _split_counts(order, F.k, free, starred)
        yield ClaimReport(order, j, s, F.k)


def _sweep(F: Family, Fstar: Family) -> tuple[list[int], int, int]:
    """Partition counts plus the two arc totals, in one pass over all orders."""
    free = frozenset(F.difference(Fstar).members)
    starred = frozenset(Fstar.members)
    counts = [0] * (F.k + 1)
    free_total = star_total = 0
    for order in _orders(F.n):
        j, s = _split_counts(order, F.k, free, starred)
        if j >= len(counts):
            counts.extend([0] * (j + 1 - len(counts)))
        counts[j] += 1
        free_total += j
        star_total += s
    return counts, free_total, star_total


def cycle_partition(F: Family, Fstar: Family) -> CyclePartition:
    """Counts c_j of cyclic orders carrying exactly j arcs from F - F*.

    Without the pair hypothesis j can exceed k; the tuple then grows to fit.
    """
    if not Fstar.issubset(F):
        raise FamilyError("F* must be a subfamily of F")
    counts, _, _ = _sweep(F, Fstar)
    return CyclePartition(tuple(counts))


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class AggregateTrace:
    n: int
    k: int
    counts: tuple[int, ...]
    incidence: int
    star_size: int
    free_size: int
    free_arc_total: int
    star_arc_total: int
    star_arc_bound: int
    objective: Fraction
    line1: Fraction
    line2: Fraction
    coefficients: tuple[Fraction, ...]  # (i n + 2k(k - i)) / k for i = 1..k-1
    line3: Fraction
    final: int

    @property
    def free_identity_ok(self) -> bool:
        weighted = sum(i * c for i, c in enumerate(self.counts))
        return self.free_size * self.incidence == self.free_arc_total == weighted

    @property
    def star_identity_ok(self) -> bool:
        return self.star_size * self.incidence == self.star_arc_total

    @property
    def coefficients_ok(self) -> bool:
        return all(c <= self.n for c in self.coefficients)

    @property
    def boundary(self) -> bool:
        return self.n == 2 * self.k

    @property
    def equality(self) -> bool:
        return self.objective == self.final

    @property
    def forced_partition(self) -> Optional[bool]:
        """On equality with n > 2k: whether only c_0 and c_k are nonzero."""
        if not self.equality or self.boundary:
            return None
        return all(c == 0 for c in self.counts[1:self.k])

    @property
    def ok(self) -> bool:
        return (
            self.free_identity_ok
            and self.star_identity_ok
            and self.star_arc_total <= self.star_arc_bound
            and self.objective <= self.line1
            and self.line1 == self.line2
            and self.coefficients_ok
            and self.line2 <= self.line3
            and self.line3 == self.final
            and self.forced_partition is not False
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "counts": list(self.counts),
            "incidence": self.incidence,
            "star_size": self.star_size,
            "free_size": self.free_size,
            "free_arc_total": self.free_arc_total,
            "star_arc_total": self.star_arc_total,
            "star_arc_bound": self.star_arc_bound,
            "free_identity_ok": self.free_identity_ok,
            "star_identity_ok": self.star_identity_ok,
            "objective": _frac(self.objective),
            "line1": _frac(self.line1),
            "line2": _frac(self.line2),
            "coefficients": [_frac(c) for c in self.coefficients],
            "coefficients_ok": self.coefficients_ok,
            "line3": _frac(self.line3),
            "final": self.final,
            "equality": self.equality,
            "boundary": self.boundary,
            "forced_partition": self.forced_partition,
            "ok": self.ok,
        }


def aggregate_inequality(F: Family, Fstar: Family) -> AggregateTrace:
    """Evaluate every quantity of the cycle double count exactly."""
    check_pair_hypothesis(F, Fstar)
    n, k = F.n, F.k
    counts, free_total, star_total = _sweep(F, Fstar)
    incidence = math.factorial(k) * math.factorial(n - k)
    c = counts
    star_bound = n * c[0] + sum(2 * (k - i) * c[i] for i in range(1, k + 1))
    weighted = sum(i * c[i] for i in range(1, k + 1))
    ratio = Fraction(n, k)
    free_size = len(F) - len(Fstar)
    objective = len(Fstar) + ratio * free_size
    line1 = (star_bound + ratio * weighted) / incidence
    coefs = tuple(Fraction(i * n + 2 * k * (k - i), k) for i in range(1, k))
    line2 = (n * c[0] + n * c[k] + sum(coefs[i - 1] * c[i] for i in range(1, k))) / incidence
    line3 = Fraction(n * sum(c), incidence)
    return AggregateTrace(
        n=n,
        k=k,
        counts=tuple(counts),
        incidence=incidence,
        star_size=len(Fstar),
        free_size=free_size,
        free_arc_total=free_total,
        star_arc_total=star_total,
        star_arc_bound=star_bound,
        objective=objective,
        line1=line1,
        line2=line2,
        coefficients=coefs,
        line3=line3,
        final=binom(n, k),
    )
