"""Command-line front end.

Exit codes: 0 pass / exhausted, 1 violation or failed assertion, 2 usage or
parse error, 3 budget or resource guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .clusters import (
    CENSUS_BUDGET, cluster_classes, cluster_members, find_cluster, simple_cluster_classes,
)
from .cycle import aggregate_inequality
from .exceptions import (
    ClusterforgeError, HypothesisViolation, ParseError, ResourceGuardError,
)
from .ground import Params, read_family
from .search import Budget, SearchProblem, default_workers, solve
from .verify import DEFAULT_TRIALS, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("clusterforge")


@dataclass
class Report:
    command: str
    params: Optional[Params]
    outcome: str  # pass | fail | value | error
    details: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params.as_dict() if self.params else None,
            "outcome": self.outcome,
            "exit_code": self.exit_code,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.outcome}"]
        if self.params:
            p = self.params
            lines.append(f"  params: n={p.n} k={p.k} d={p.d}")
        for key in sorted(self.details):
            value = self.details[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"  {key}: {value}")
        return "\n".join(lines)


# -- commands --------------------------------------------------------------

def cmd_check(path, d: int, simple: bool = False) -> Report:
    F = read_family(path, d=d)
    w = find_cluster(F, d, simple_only=simple)
    details = {"size": len(F), "simple": simple}
    if w is None:
        return Report("check", F.params, "pass", {**details, "cluster_free": True})
    return Report(
        "check", F.params, "fail",
        {**details, "cluster_free": False, "witness": w.to_dict()},
        EXIT_FAIL,
    )


def _search_checks(problem: SearchProblem, result) -> dict:
    """Invariants asserted for an exhausted search with valid parameters."""
    p = problem.params
    if not problem.params_valid:
        return {}
    checks = {"optimum_matches_bound": result.optimum == result.bound}
    census = result.census
    if problem.mode == "cluster_free" and not (p.d == 2 and p.n == 2 * p.k):
        checks["only_stars"] = census["other"] == 0 and census["full"] == 0
        checks["all_centers"] = census["star"] == p.n
    elif problem.mode == "simple_cluster_free" and p.thm2_ok:
        checks["stars_present"] = census["star"] >= p.n
    elif problem.mode == "simple_cluster_free":
        del checks["optimum_matches_bound"]
    elif problem.mode == "weighted" and not (p.d == 2 and p.n == 2 * p.k):
        checks["equality_cases"] = (
            census["other"] == 0 and census["full"] == 1 and census["star"] == p.n
        )
    return checks


def cmd_search(
    n: int, k: int, d: int, mode: str = "cluster_free", *, force: bool = False,
    max_nodes: int = Budget.max_nodes, time_limit: float = Budget.time_limit,
    threads: Optional[int] = None, representatives: int = 3,
) -> Report:
    params = Params(n, k, d)
    problem = SearchProblem(
        params, mode, Budget(max_nodes, time_limit), force=force,
        max_representatives=representatives,
    )
    result = solve(problem, workers=threads)
    details = result.to_dict()
    details.pop("params")
    details["validity"] = params.flags()
    details["forced"] = force and not problem.params_valid
    if not result.exhausted:
        return Report("search", params, "fail", {**details, "checks": {}}, EXIT_BUDGET)
    checks = _search_checks(problem, result)
    details["checks"] = checks
    ok = all(checks.values())
    return Report("search", params, "pass" if ok else "fail", details,
                  EXIT_OK if ok else EXIT_FAIL)


def cmd_verify(suite: str, seed: int = 0, trials: Optional[int] = None, **shape) -> Report:
    names = SUITES if suite == "all" else (suite,)
    results = {}
    for name in names:
        results[name] = run_suite(name, seed, trials, **shape)
    ok = all(r["ok"] for r in results.values())
    details = {
        "seed": seed,
        "trials": trials if trials is not None else {n: DEFAULT_TRIALS[n] for n in names},
        "suites": results,
    }
    return Report("verify", None, "pass" if ok else "fail", details,
                  EXIT_OK if ok else EXIT_FAIL)


def cmd_census(k: int, d: int, simple: bool = False, emit: bool = False,
               budget: int = CENSUS_BUDGET) -> Report:
    if simple:
        classes = simple_cluster_classes(k, d)
    else:
        classes = cluster_classes(k, d, budget)
    details = {"k": k, "d": d, "n": 2 * k, "simple": simple, "classes": len(classes)}
    if emit:
        details["representatives"] = [[list(s) for s in c] for c in classes]
    return Report("census", None, "value", details)


def cmd_cycle_stats(path, fstar_path=None) -> Report:
    F = read_family(path)
    if fstar_path is None:
        Fstar = cluster_members(F, 2)
    else:
        Fstar = read_family(fstar_path)
        if Fstar.params.n != F.n or Fstar.params.k != F.k:
            raise ParseError("F* file must use the same n and k as F")
        Fstar = type(F)(F.params, Fstar.members)
    trace = aggregate_inequality(F, Fstar)
    details = trace.to_dict()
    details["fstar_size"] = len(Fstar)
    details["fstar_source"] = "file" if fstar_path else "disjoint-pair members"
    return Report("cycle-stats", F.params, "pass" if trace.ok else "fail", details,
                  EXIT_OK if trace.ok else EXIT_FAIL)


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="stable machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="clusterforge",
        description="d-cluster analysis and exact extremal search for k-uniform families",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="test a family file for (simple) d-clusters")
    p.add_argument("file")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--simple", action="store_true")

    p = sub.add_parser("search", parents=[common], help="exact extremal search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--simple", action="store_true", help="forbid only simple d-clusters")
    mode.add_argument("--weighted", action="store_true", help="maximize k|F*| + n|F - F*|")
    p.add_argument("--force", action="store_true", help="skip parameter validity gates")
    p.add_argument("--max-nodes", type=int, default=Budget.max_nodes)
    p.add_argument("--time-limit", type=float, default=Budget.time_limit)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $CLUSTERFORGE_THREADS or 1)")
    p.add_argument("--reps", type=int, default=3, help="representatives kept per class")

    p = sub.add_parser("verify", parents=[common], help="seeded randomized property suites")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--d", type=int, default=None)

    p = sub.add_parser("census", parents=[common], help="isomorphism classes of d-clusters")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--simple", action="store_true")
    p.add_argument("--emit", action="store_true", help="include canonical representatives")
    p.add_argument("--budget", type=int, default=CENSUS_BUDGET)

    p = sub.add_parser("cycle-stats", parents=[common], help="trace the cycle double count")
    p.add_argument("file")
    p.add_argument("--fstar", default=None, help="F* family file (default: disjoint-pair members)")
    return parser


def _dispatch(args) -> Report:
    if args.command == "check":
        return cmd_check(args.file, args.d, args.simple)
    if args.command == "search":
        mode = "weighted" if args.weighted else "simple_cluster_free" if args.simple else "cluster_free"
        threads = args.threads if args.threads is not None else default_workers()
        return cmd_search(
            args.n, args.k, args.d, mode, force=args.force, max_nodes=args.max_nodes,
            time_limit=args.time_limit, threads=threads, representatives=args.reps,
        )
    if args.command == "verify":
        return cmd_verify(args.suite, args.seed, args.trials, n=args.n, k=args.k, d=args.d)
    if args.command == "census":
        return cmd_census(args.k, args.d, args.simple, args.emit, args.budget)
    if args.command == "cycle-stats":
        return cmd_cycle_stats(args.file, args.fstar)
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = _dispatch(args)
    except HypothesisViolation as exc:
        report = Report(args.command, None, "error",
                        {"error": str(exc), "kind": "hypothesis", "witness": exc.witness},
                        EXIT_FAIL)
    except ResourceGuardError as exc:
        report = Report(args.command, None, "error", {"error": str(exc), "kind": "budget"},
                        EXIT_BUDGET)
    except (ClusterforgeError, OSError) as exc:
        report = Report(args.command, None, "error", {"error": str(exc), "kind": "usage"},
                        EXIT_USAGE)
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
