"""Seeded random instances and the verification suites behind ``clusterforge verify``.

Every suite returns a plain dict with ``ok``, the number of instances
checked, and (on failure) the first violation together with enough data to
reproduce it.
"""

from __future__ import annotations

import random
from collections import Counter
from math import factorial
from typing import Optional

from .clusters import cluster_members, find_cluster
from .cycle import _arc_masks, _orders, aggregate_inequality, iter_cycle_claims
from .exceptions import FamilyError
from .ground import (
    Family, Params, binom, complement_family, from_masks, full_family,
    ksets, star,
)
from .operators import (
    avg_binom_bound, check_propint, check_sum_identity, check_trianglepart, link,
    unique_extension_bound,
)

SUITES = ("identities", "trianglepart", "propint", "cycle", "avgid")
DEFAULT_TRIALS = {
    "identities": 1000,
    "trianglepart": 100,
    "propint": 100,
    "cycle": 200,
    "avgid": 10_000,
}
REJECTION_ATTEMPTS = 20


# -- generators ------------------------------------------------------------

def random_family(params: Params, rng: random.Random, density: Optional[float] = None) -> Family:
    if density is None:
        density = rng.random()
    return from_masks(params, (m for m in ksets(params.n, params.k) if rng.random() < density))


def random_free_family(
    params: Params, d: int, rng: random.Random, simple: bool = False
) -> tuple[Family, dict]:
    """A family with no (simple) d-cluster, plus the generator settings used.

    Density-controlled rejection first; if that keeps failing, perturb a star:
    keep a random part of it and greedily add outside sets that stay free.
    """
    density = rng.uniform(0.05, 0.6)
    for attempt in range(1, REJECTION_ATTEMPTS + 1):
        F = random_family(params, rng, density)
        if find_cluster(F, d, simple_only=simple) is None:
            return F, {"method": "rejection", "density": round(density, 6), "attempts": attempt}
    x = rng.randint(1, params.n)
    keep = rng.uniform(0.5, 1.0)
    base = [m for m in star(params, x).members if rng.random() < keep]
    others = [m for m in ksets(params.n, params.k) if not m >> (x - 1) & 1]
    rng.shuffle(others)
    chosen = list(base)
    added = 0
    for m in others[: rng.randint(0, len(others))]:
        trial = from_masks(params, chosen + [m])
        if find_cluster(trial, d, simple_only=simple) is None:
            chosen.append(m)
            added += 1
    info = {
        "method": "star_perturbation",
        "density": round(density, 6),
        "center": x,
        "keep": round(keep, 6),
        "added": added,
    }
    return from_masks(params, chosen), info


def _trial_rng(seed: int, suite: str, trial: int) -> random.Random:
    return random.Random(f"{seed}:{suite}:{trial}")


def _family_data(F: Family) -> dict:
    return {"n": F.n, "k": F.k, "sets": F.as_lists()}


# -- suites ----------------------------------------------------------------

def suite_identities(seed: int, trials: int, shapes=((6, 2), (7, 3))) -> dict:
    """Link-sum identity, unique-extension bound and the complement link identity."""
    checked = 0
    for n, k in shapes:
        params = Params(n, k)
        for t in range(trials):
            rng = _trial_rng(seed, f"identities-{n}-{k}", t)
            F = random_family(params, rng)
            lhs, rhs = check_sum_identity(F)
            unique, bound = unique_extension_bound(F)
            comp = complement_family(F)
            per_x = [len(link(F, x)) + len(link(comp, x)) for x in range(1, n + 1)]
            checked += 1
            problems = []
            if lhs != rhs:
                problems.append(f"link sum {lhs} != k|F| {rhs}")
            if unique > bound:
                problems.append(f"unique extensions {unique} > bound {bound}")
            if any(v != binom(n - 1, k - 1) for v in per_x):
                problems.append(f"complement link sizes {per_x}")
            if problems:
                return {
                    "ok": False,
                    "checked": checked,
                    "violation": {"trial": t, "problems": problems, "family": _family_data(F)},
                }
    return {"ok": True, "checked": checked}


def suite_trianglepart(seed: int, trials: int, n: int = 7, k: int = 3, d: int = 3) -> dict:
    params = Params(n, k, d)
    checked = clusters_seen = 0
    for t in range(trials):
        rng = _trial_rng(seed, "trianglepart", t)
        F = random_family(params, rng)
        Fstar = cluster_members(F, d)
        for x in range(1, n + 1):
            rep = check_trianglepart(F, Fstar, x, d)
            clusters_seen += rep.checked
            if not rep.ok:
                return {
                    "ok": False,
                    "checked": checked,
                    "violation": {
                        "trial": t,
                        "detail": rep.violation,
                        "family": _family_data(F),
                        "fstar": Fstar.as_lists(),
                    },
                }
        checked += 1
    return {"ok": True, "checked": checked, "link_clusters_checked": clusters_seen}


def suite_propint(seed: int, trials: int, n: int = 7, k: int = 3, d: int = 3) -> dict:
    params = Params(n, k, d)
    checked = pairs = 0
    methods: Counter = Counter()
    for t in range(trials):
        rng = _trial_rng(seed, "propint", t)
        F, info = random_free_family(params, d, rng, simple=True)
        methods[info["method"]] += 1
        rep = check_propint(F, d)
        pairs += rep.checked
        if not rep.ok:
            return {
                "ok": False,
                "checked": checked,
                "violation": {"trial": t, "detail": rep.violation, "generator": info,
                              "family": _family_data(F)},
            }
        checked += 1
    return {"ok": True, "checked": checked, "pairs_checked": pairs,
            "generators": dict(sorted(methods.items()))}


def incidence_table(n: int, k: int) -> dict[int, int]:
    """For every k-set, the number of cyclic orders having it as an arc."""
    counts = dict.fromkeys(ksets(n, k), 0)
    for order in _orders(n):
        for a in set(_arc_masks(order, k)):
            counts[a] += 1
    return counts


def _cycle_instances(params: Params, seed: int, trials: int):
    n = params.n
    yield "full", full_family(params)
    for x in range(1, n + 1):
        yield f"star{x}", star(params, x)
    for t in range(trials):
        rng = _trial_rng(seed, f"cycle-{n}-{params.k}", t)
        if t % 2:
            F, _ = random_free_family(params, 2, rng)
            if rng.random() < 0.5:
                F = F.union(random_family(params, rng, rng.uniform(0.0, 0.3)))
        else:
            F = random_family(params, rng)
        yield f"random{t}", F


def suite_cycle(seed: int, trials: int, shapes=((6, 2), (7, 3))) -> dict:
    """Claims (i)/(ii) over every cyclic order, plus the aggregate chain."""
    out = {"ok": True, "checked": 0, "orders_checked": 0, "equality_cases": 0, "incidence": {}}
    for n, k in shapes:
        params = Params(n, k)
        table = incidence_table(n, k)
        values = sorted(set(table.values()))
        out["incidence"][f"{n},{k}"] = values
        if values != [factorial(k) * factorial(n - k)]:
            out.update(ok=False, violation={"shape": [n, k], "incidence_values": values})
            return out
        for label, F in _cycle_instances(params, seed, trials):
            Fstar = cluster_members(F, 2)
            for rep in iter_cycle_claims(F, Fstar):
                out["orders_checked"] += 1
                if not rep.ok:
                    out.update(ok=False, violation={
                        "instance": label, "claims": rep.to_dict(),
                        "family": _family_data(F), "fstar": Fstar.as_lists(),
                    })
                    return out
            trace = aggregate_inequality(F, Fstar)
            is_star = len(F) == binom(n - 1, k - 1) and len(Fstar) == 0 and _common(F)
            is_full = len(F) == binom(n, k)
            expect_eq = is_star or is_full
            out["checked"] += 1
            out["equality_cases"] += trace.equality
            if not trace.ok or trace.objective > trace.final or (
                n > 2 * k and trace.equality != expect_eq
            ):
                out.update(ok=False, violation={
                    "instance": label, "trace": trace.to_dict(),
                    "family": _family_data(F), "fstar": Fstar.as_lists(),
                })
                return out
    return out


def _common(F: Family) -> bool:
    acc = -1
    for m in F.members:
        acc &= m
    return bool(F.members) and acc != 0


def suite_avgid(seed: int, trials: int) -> dict:
    rng = random.Random(f"{seed}:avgid")
    for t in range(trials):
        m = rng.randint(1, 12)
        rs = [rng.randint(0, 30) for _ in range(m)]
        l = rng.randint(0, 8)
        lhs, rhs = avg_binom_bound(rs, l)
        if lhs < rhs:
            return {"ok": False, "checked": t,
                    "violation": {"trial": t, "rs": rs, "l": l, "lhs": lhs, "rhs": rhs}}
    return {"ok": True, "checked": trials}


def run_suite(name: str, seed: int, trials: Optional[int] = None, **shape) -> dict:
    if trials is None:
        trials = DEFAULT_TRIALS[name]
    if name == "identities":
        shapes = [(shape["n"], shape["k"])] if shape.get("n") else ((6, 2), (7, 3))
        return suite_identities(seed, trials, shapes)
    if name == "trianglepart":
        return suite_trianglepart(seed, trials, **_ndk(shape, (7, 3, 3)))
    if name == "propint":
        return suite_propint(seed, trials, **_ndk(shape, (7, 3, 3)))
    if name == "cycle":
        shapes = [(shape["n"], shape["k"])] if shape.get("n") else ((6, 2), (7, 3))
        return suite_cycle(seed, trials, shapes)
    if name == "avgid":
        return suite_avgid(seed, trials)
    raise FamilyError(f"unknown suite {name!r}; expected one of {SUITES} or 'all'")


def _ndk(shape: dict, default) -> dict:
    n, k, d = default
    return {"n": shape.get("n") or n, "k": shape.get("k") or k, "d": shape.get("d") or d}
