"""Shared brute-force oracles; these only use frozensets and itertools."""

from itertools import combinations

import pytest

from clusterforge.ground import Params, elements


def as_sets(members):
    return [frozenset(elements(m)) for m in members]


def is_cluster_bf(sets, k):
    """Union at most 2k and empty common intersection."""
    union = frozenset().union(*sets)
    inter = frozenset.intersection(*sets)
    return len(union) <= 2 * k and not inter


def is_simple_bf(sets):
    """Some role assignment B, B', B_1.. with B & B' = {a_i} and B - B_i = {a_i}."""
    d = len(sets)
    for i, j in combinations(range(d), 2):
        for B, Bp in ((sets[i], sets[j]), (sets[j], sets[i])):
            common = B & Bp
            if len(common) != d - 2:
                continue
            rest = [s for t, s in enumerate(sets) if t not in (i, j)]
            diffs = [B - s for s in rest]
            if all(len(x) == 1 for x in diffs) and frozenset().union(*diffs, frozenset()) == common \
                    and len({next(iter(x)) for x in diffs}) == len(diffs):
                return True
    return False


def clusters_bf(members, k, d, simple=False):
    sets = as_sets(members)
    out = []
    for combo in combinations(range(len(sets)), d):
        chosen = [sets[i] for i in combo]
        if simple:
            if is_simple_bf(chosen):
                out.append(combo)
        elif is_cluster_bf(chosen, k):
            out.append(combo)
    return out


@pytest.fixture
def p52():
    return Params(5, 2, 2)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
