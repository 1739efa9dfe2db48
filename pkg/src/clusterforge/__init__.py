"""Analysis of d-clusters in k-uniform set families and exact extremal search."""

__version__ = "0.1.0"


from .clusters import (
    ClusterWitness, SimpleClusterWitness, as_simple_cluster, canonicalize, census_all,
    census_simple, cluster_members, find_cluster, is_cluster,
)
from .cycle import (
    CyclicPerm, aggregate_inequality, arc_family, arcs, cycle_partition, incidence_count,
    verify_cycle_claims,
)
from .exceptions import (
    ClusterforgeError, FamilyError, HypothesisViolation, ParamsError, ParseError,
    ResourceGuardError,
)
from .ground import (
    Family, Params, binom, complement_family, full_family, make_family, parse_family,
    read_family, star, write_family,
)
from .operators import (
    alpha, avg_binom_bound, check_propint, check_sum_identity, check_trianglepart, link,
    link_star, r_family, s_family, split, unique_extension_bound, upset,
)
from .search import (
    Budget, SearchProblem, SearchResult, classify_extremal, max_cluster_free, max_weighted,
    oracle_exhaustive, solve,
)

__all__ = [
    "Budget",
    "ClusterWitness",
    "ClusterforgeError",
    "CyclicPerm",
    "Family",
    "FamilyError",
    "HypothesisViolation",
    "Params",
    "ParamsError",
    "ParseError",
    "ResourceGuardError",
    "SearchProblem",
    "SearchResult",
    "SimpleClusterWitness",
    "aggregate_inequality",
    "alpha",
    "arc_family",
    "arcs",
    "as_simple_cluster",
    "avg_binom_bound",
    "binom",
    "canonicalize",
    "census_all",
    "census_simple",
    "check_propint",
    "check_sum_identity",
    "check_trianglepart",
    "classify_extremal",
    "cluster_members",
    "complement_family",
    "cycle_partition",
    "find_cluster",
    "full_family",
    "incidence_count",
    "is_cluster",
    "link",
    "link_star",
    "make_family",
    "max_cluster_free",
    "max_weighted",
    "oracle_exhaustive",
    "parse_family",
    "r_family",
    "read_family",
    "s_family",
    "solve",
    "split",
    "star",
    "unique_extension_bound",
    "upset",
    "verify_cycle_claims",
    "write_family",
]
