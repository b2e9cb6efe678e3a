"""Worst-case expected subgraph counts in hidden-variable random graphs.

The weight distribution is known only through its mean, its mean absolute
deviation and its support range.  The largest expected count of any small
pattern over that set is attained by a three-point law, which makes the
bound exact and cheap to evaluate.
"""

__version__ = "0.1.0"

from .ambiguity import (  # noqa: E402
    AmbiguityParams,
    PowerLawParams,
    ThreePointDistribution,
    grid_search_optimality_oracle,
    mad_bounds_from_variance,
    max_feasible_mad,
    powerlaw_params,
    self_consistent_cutoff,
    three_point,
    variance_of_three_point,
)
from .bounds import (  # noqa: E402
    BoundResult,
    Regime,
    clique_bound_mad,
    moment_identity_bound_cliques,
    powerlaw_clique_count,
    powerlaw_clique_scaling_dense,
    scaling_mad,
    scaling_mad_chunglu,
    scaling_variance,
    subgraph_bound_variance_chunglu,
    tight_bound,
    variance_matched_clique_bound,
)
from .errors import *  # noqa: E402,F401,F403
from .graph import Graph, read_edge_list, write_edge_list  # noqa: E402
from .graphgen import (  # noqa: E402
    WeightVector,
    conditional_expected_count,
    realize_graph,
    sample_weights_powerlaw,
    sample_weights_three_point,
)
from .kernels import (  # noqa: E402
    CHUNG_LU,
    GENERALIZED,
    POISSON,
    Kernel,
    check_assumption1,
    check_assumption2,
    custom_kernel,
    eval_f,
    eval_r,
    kernel_from_name,
)
from .motifs import (  # noqa: E402
    CutoffChoice,
    RatioReport,
    SummaryStats,
    Variant,
    bound_ratio,
    count_copies,
    summary_stats,
)
from .patterns import (  # noqa: E402
    Pattern,
    automorphism_count,
    catalog,
    degree_stats,
    leading_constant,
    parse_pattern,
    pattern_from_edge_list,
)
