"""Link, up-set, exchange (alpha), R/S operators and the counting checks built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .clusters import cluster_members, find_cluster, iter_cluster_indices
from .exceptions import FamilyError, HypothesisViolation
from .ground import Family, binom, elements, ksets, popcount


@dataclass(frozen=True)
class LinkFamily:
    """(k-1)-sets over [n] - {x}, ascending bitmask order."""

    x: int
    members: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, mask):
        return mask in self.members

    def as_lists(self) -> list[list[int]]:
        return [list(elements(m)) for m in self.members]


@dataclass(frozen=True)
class AlphaSet:
    base: int
    members: int  # bitmask, subset of base

    def elements(self) -> tuple[int, ...]:
        return elements(self.members)

    def __len__(self):
        return popcount(self.members)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a proposition check; ``violation`` is None on success."""

    name: str
    violation: Optional[dict] = None
    checked: int = 0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violation is None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "violation": self.violation,
            "details": self.details,
        }


def _check_x(F: Family, x: int) -> int:
    if not 1 <= x <= F.n:
        raise FamilyError(f"element {x} out of range [1, {F.n}]")
    return 1 << (x - 1)


def link(F: Family, x: int) -> LinkFamily:
    bit = _check_x(F, x)
    return LinkFamily(x, tuple(sorted(m ^ bit for m in F.members if m & bit)))


def upset(F: Family, D: int) -> Family:
    """Members of F containing the (k-1)-set ``D``."""
    if popcount(D) != F.k - 1:
        raise FamilyError(f"{elements(D)} is not a {F.k - 1}-set")
    return Family(F.params, tuple(m for m in F.members if m & D == D))


def upset_size(F: Family, D: int) -> int:
    return sum(1 for m in F.members if m & D == D)


def _upset_counts(F: Family) -> dict[int, int]:
    counts: dict[int, int] = {}
    for m in F.members:
        rest = m
        while rest:
            low = rest & -rest
            rest ^= low
            D = m ^ low
            counts[D] = counts.get(D, 0) + 1
    return counts


def alpha_mask(F: Family, B: int) -> int:
    out = 0
    for other in F.members:
        diff = B & ~other
        if diff and not diff & (diff - 1):
            out |= diff
    return out


def alpha(F: Family, B: int) -> AlphaSet:
    """Elements y of B with some B' in F such that B - B' = {y}."""
    if B not in F:
        raise FamilyError(f"{elements(B)} is not a member of the family")
    return AlphaSet(B, alpha_mask(F, B))


def split(F: Family, x: int) -> tuple[Family, Family]:
    bit = _check_x(F, x)
    inside = tuple(m for m in F.members if m & bit)
    outside = tuple(m for m in F.members if not m & bit)
    return Family(F.params, inside), Family(F.params, outside)


def _link_pool(F: Family, x: int) -> list[int]:
    bit = 1 << (x - 1)
    return [D for D in ksets(F.n, F.k - 1) if not D & bit]


def r_family(F: Family, x: int, d: int) -> LinkFamily:
    """(k-1)-sets D avoiding x with D & B a (d-2)-subset of alpha(B), some B in F^{-x}.

    For d = 2 the only admissible intersection is the empty set.
    """
    _check_x(F, x)
    if not 2 <= d <= F.k:
        raise FamilyError(f"need 2 <= d <= k, got d={d}")
    _, outside = split(F, x)
    alphas = [(B, alpha_mask(F, B)) for B in outside.members]
    out = []
    for D in _link_pool(F, x):
        for B, a in alphas:
            inter = D & B
            if popcount(inter) == d - 2 and inter & ~a == 0:
                out.append(D)
                break
    return LinkFamily(x, tuple(out))


def s_family(F: Family, x: int) -> LinkFamily:
    """Sets B - {y} with B in F^{-x} and y in B outside alpha(B)."""
    _check_x(F, x)
    _, outside = split(F, x)
    out = set()
    for B in outside.members:
        rest = B & ~alpha_mask(F, B)
        while rest:
            low = rest & -rest
            rest ^= low
            out.add(B ^ low)
    return LinkFamily(x, tuple(sorted(out)))


def link_star(F: Family, Fstar: Family, x: int) -> LinkFamily:
    """Link members with a unique extension in F, together with the link of F*."""
    if not Fstar.issubset(F):
        raise FamilyError("F* must be a subfamily of F")
    counts = _upset_counts(F)
    base = link(F, x)
    starred = set(link(Fstar, x).members)
    return LinkFamily(x, tuple(D for D in base.members if counts[D] == 1 or D in starred))


# -- counting propositions -------------------------------------------------

def check_sum_identity(F: Family) -> tuple[int, int]:
    """(sum over x of |link(F, x)|, k|F|)."""
    lhs = sum(len(link(F, x)) for x in range(1, F.n + 1))
    return lhs, F.k * len(F)


def unique_extension_bound(F: Family) -> tuple[int, Fraction]:
    """Count of (k-1)-sets with exactly one superset in F, and its upper bound."""
    n, k = F.n, F.k
    if not k < n:
        raise FamilyError("unique_extension_bound requires k < n")
    counts = _upset_counts(F)
    unique = sum(1 for c in counts.values() if c == 1)
    bound = Fraction(n * binom(n - 1, k - 1) - k * len(F), n - k)
    return unique, bound


def check_trianglepart(F: Family, Fstar: Family, x: int, d: int) -> CheckReport:
    """Every member of a (d-1)-cluster in link(F, x) has a unique extension or lies in link(F*, x)."""
    if not 3 <= d <= F.k:
        raise FamilyError(f"need 3 <= d <= k, got d={d}")
    _check_x(F, x)
    if not Fstar.issubset(F):
        raise HypothesisViolation("F* must be a subfamily of F")
    outside = [m for m in cluster_members(F, d).members if m not in Fstar]
    if outside:
        raise HypothesisViolation(
            "F has a d-cluster member outside F*",
            witness=[list(elements(m)) for m in outside],
        )
    counts = _upset_counts(F)
    lk = link(F, x).members
    starred = set(link(Fstar, x).members)
    checked = 0
    for idx in iter_cluster_indices(lk, F.k - 1, d - 1):
        checked += 1
        for i in idx:
            D = lk[i]
            if counts[D] != 1 and D not in starred:
                return CheckReport(
                    "trianglepart",
                    violation={
                        "x": x,
                        "cluster": [list(elements(lk[j])) for j in idx],
                        "member": list(elements(D)),
                        "upset_size": counts[D],
                    },
                    checked=checked,
                )
    return CheckReport("trianglepart", checked=checked)


def check_propint(F: Family, d: int) -> CheckReport:
    """Pairs with |alpha(B) & B'| >= d-2 must intersect in at least d-1 elements."""
    if not 2 <= d <= F.k:
        raise FamilyError(f"need 2 <= d <= k, got d={d}")
    w = find_cluster(F, d, simple_only=True)
    if w is not None:
        raise HypothesisViolation(
            "F contains a simple d-cluster", witness=w.to_dict()
        )
    alphas = {B: alpha_mask(F, B) for B in F.members}
    checked = 0
    for B in F.members:
        a = alphas[B]
        for Bp in F.members:
            if popcount(a & Bp) < d - 2:
                continue
            checked += 1
            if popcount(B & Bp) < d - 1:
                return CheckReport(
                    "propint",
                    violation={
                        "B": list(elements(B)),
                        "B_prime": list(elements(Bp)),
                        "alpha": list(elements(a)),
                    },
                    checked=checked,
                )
    return CheckReport("propint", checked=checked)


def avg_binom_bound(rs: Sequence[int], l: int) -> tuple[int, int]:
    """(sum of binom(r_i, l), m * binom(floor(mean r), l))."""
    if not rs:
        raise ValueError("rs must be non-empty")
    m = len(rs)
    lhs = sum(binom(r, l) for r in rs)
    rhs = m * binom(sum(rs) // m, l)
    return lhs, rhs
