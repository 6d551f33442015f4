"""PageRank of tree-like link structures: closed forms, oracles, transforms and optimization."""
from .closed_forms import (
    FamilyParams,
    pr_family,
    pr_queue_family,
    pr_root_bidirectional,
    pr_root_bidirectional_vectorial,
    pr_root_profile,
    pr_vector_cyclical,
    pr_vertex_cyclical,
)
from .condense import (
    Condensation,
    is_pr_digraph_tree,
    pr_digraph_roots,
    strongly_connected_components,
    to_cyclical_tree,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    BidirectionalTree,
    CyclicalTree,
    Digraph,
    LevelProfile,
    QCensus,
    RootedTree,
    StructureReport,
    build_tree,
    generate_family,
    level_census,
    parse_profile,
    render_profile,
    validate,
)
from .hierarchy import (
    FactTable,
    height_hierarchy,
    queue_facts,
    ratio_diagnostics,
    size_hierarchy,
    solve_alpha0,
    solve_queue_threshold,
)
from .optimizer import Constraints, OptimizationResult, optimize_profile, recommend_bidirectional
from .oracle import PRVector, fixed_point_pagerank, walk_series_pagerank
from .transforms import (
    close_cycle,
    delete_last_level,
    figure4,
    figure5,
    promote_to_bidirectional,
    prune_last_level,
    queue_tree,
    rewire_levels,
)

__version__ = "0.1.0"
