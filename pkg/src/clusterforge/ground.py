"""Ground-set parameters, k-sets as bitmasks, and uniform families.

A k-set over ``[n]`` is stored as a plain ``int`` whose bit ``i`` stands for
element ``i + 1``.  Everything user-facing (file I/O, reports, ``elements``)
is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .exceptions import FamilyError, ParamsError, ParseError

MAX_N = 64


def binom(a: int, b: int) -> int:
    """Exact binomial coefficient, 0 when ``b > a``."""
    if a < 0 or b < 0:
        raise ValueError(f"binom requires non-negative arguments, got ({a}, {b})")
    # Python integers are unbounded, so there is no wraparound to detect.
    return math.comb(a, b)


def popcount(x: int) -> int:
    return x.bit_count()


@dataclass(frozen=True)
class Params:
    n: int
    k: int
    d: int = 2

    def __post_init__(self):
        for name in ("n", "k", "d"):
            if not isinstance(getattr(self, name), int):
                raise ParamsError(f"{name} must be an integer")
        if self.n < 1:
            raise ParamsError(f"n must be >= 1, got {self.n}")
        if self.n > MAX_N:
            raise ParamsError(f"n = {self.n} exceeds the bit-vector width {MAX_N}")
        if not 2 <= self.d <= self.k <= self.n:
            raise ParamsError(
                f"need 2 <= d <= k <= n, got n={self.n}, k={self.k}, d={self.d}"
            )

    @property
    def def1_ok(self) -> bool:
        """n >= dk/(d-1), in integer form."""
        return self.n * (self.d - 1) >= self.d * self.k

    @property
    def thm1_ok(self) -> bool:
        return 2 * self.k <= self.n

    @property
    def def2_ok(self) -> bool:
        return self.n >= 2 * self.k - self.d + 2

    @property
    def thm2_ok(self) -> bool:
        return self.n >= 3 * self.k - 2 * self.d + 4

    def with_d(self, d: int) -> "Params":
        return Params(self.n, self.k, d)

    def flags(self) -> dict:
        return {
            "def1_ok": self.def1_ok,
            "def2_ok": self.def2_ok,
            "thm1_ok": self.thm1_ok,
            "thm2_ok": self.thm2_ok,
        }

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d}


def to_mask(elems: Iterable[int]) -> int:
    """1-based elements -> bitmask (no validation)."""
    m = 0
    for e in elems:
        m |= 1 << (e - 1)
    return m


def elements(mask: int) -> tuple[int, ...]:
    """Bitmask -> ascending 1-based elements."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def kset(elems: Sequence[int], n: int, k: int) -> int:
    """Validated k-set from 1-based elements."""
    elems = list(elems)
    for e in elems:
        if not isinstance(e, int) or not 1 <= e <= n:
            raise FamilyError(f"element {e!r} out of range [1, {n}]")
    if len(set(elems)) != len(elems):
        raise FamilyError(f"repeated element in {elems}")
    if len(elems) != k:
        raise FamilyError(f"wrong cardinality: {sorted(elems)} has {len(elems)} elements, expected {k}")
    return to_mask(elems)


def ksets(n: int, k: int) -> list[int]:
    """All k-subsets of [n] as bitmasks, in ascending numeric order."""
    if k == 0:
        return [0]
    if k > n:
        return []
    out = []
    v = (1 << k) - 1
    limit = 1 << n
    while v < limit:
        out.append(v)
        # Gosper's hack: next integer with the same popcount
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return out


@dataclass(frozen=True)
class Family:
    """A k-uniform family in canonical (ascending bitmask) order."""

    params: Params
    members: tuple[int, ...]

    def __post_init__(self):
        n, k = self.params.n, self.params.k
        full = (1 << n) - 1
        prev = -1
        for m in self.members:
            if m <= prev:
                raise FamilyError("members must be strictly increasing")
            if m & ~full:
                raise FamilyError(f"set {elements(m)} has elements outside [1, {n}]")
            if popcount(m) != k:
                raise FamilyError(f"set {elements(m)} does not have {k} elements")
            prev = m
        object.__setattr__(self, "_lookup", frozenset(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask) -> bool:
        return mask in self._lookup

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    def as_lists(self) -> list[list[int]]:
        return [list(elements(m)) for m in self.members]

    def issubset(self, other: "Family") -> bool:
        return self._lookup <= other._lookup

    def union(self, other: "Family") -> "Family":
        return from_masks(self.params, self._lookup | other._lookup)

    def difference(self, other: "Family") -> "Family":
        return from_masks(self.params, self._lookup - other._lookup)

    def sort_key(self) -> tuple[int, ...]:
        return self.members


def from_masks(params: Params, masks: Iterable[int]) -> Family:
    return Family(params, tuple(sorted(set(masks))))


def make_family(params: Params, sets: Iterable[Sequence[int]]) -> Family:
    """Build a canonical family from 1-based element lists, dropping duplicates."""
    return from_masks(params, (kset(s, params.n, params.k) for s in sets))


def star(params: Params, x: int) -> Family:
    """All k-sets containing ``x``; size binom(n-1, k-1)."""
    if not 1 <= x <= params.n:
        raise FamilyError(f"star center {x} out of range [1, {params.n}]")
    bit = 1 << (x - 1)
    return Family(params, tuple(m for m in ksets(params.n, params.k) if m & bit))


def full_family(params: Params) -> Family:
    return Family(params, tuple(ksets(params.n, params.k)))


def complement_family(F: Family) -> Family:
    return Family(F.params, tuple(m for m in ksets(F.n, F.k) if m not in F))


def common_element(F: Family) -> int:
    """Bitmask of elements shared by every member (0 for the empty family)."""
    if not F.members:
        return 0
    acc = (1 << F.n) - 1
    for m in F.members:
        acc &= m
    return acc


# -- family files ----------------------------------------------------------

def parse_family(text: str, d: int = 2) -> Family:
    """Parse the ``n k`` header + one-set-per-line format.

    ``#`` starts a comment; blank lines are ignored.  Errors carry the
    1-based line number.
    """
    params = None
    masks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if params is None:
            if len(nums) != 2:
                raise ParseError(f"header must be 'n k', got {line!r}", lineno)
            try:
                params = Params(nums[0], nums[1], d)
            except ParamsError as exc:
                raise ParseError(str(exc), lineno) from None
            continue
        try:
            masks.append(kset(nums, params.n, params.k))
        except FamilyError as exc:
            raise ParseError(str(exc), lineno) from None
    if params is None:
        raise ParseError("missing 'n k' header")
    return from_masks(params, masks)


def read_family(path, d: int = 2) -> Family:
    with open(path, encoding="utf-8") as fh:
        return parse_family(fh.read(), d=d)


def format_family(F: Family) -> str:
    lines = [f"{F.n} {F.k}"]
    lines.extend(" ".join(map(str, elements(m))) for m in F.members)
    return "\n".join(lines) + "\n"


def write_family(F: Family, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_family(F))
