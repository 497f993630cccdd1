"""entropart: structural-entropy partitioning and abstraction toolkit.

Builds similarity graphs from feature matrices, sparsifies them by
one-dimensional structural entropy, minimizes high-dimensional structural
entropy over encoding trees (undirected and directed), aggregates
embeddings over the optimized hierarchy, and extracts skills from
trajectory logs via common-path entropy.
"""

from .graph import (
    WeightedGraph,
    DegreeProfile,
    build_graph,
    degree_profile,
    strongly_connected_components,
)
from .tree import (
    EncodingTree,
    one_dim_entropy,
    flat_tree,
    node_entropy,
    tree_entropy,
    brute_force_optimal,
)
from .optimizer import (
    SparScore,
    stretch,
    compress,
    spar_score,
    optimize,
    optimize_trace,
)
from .filtration import (
    EmbeddingMatrix,
    SimilarityGraph,
    similarity_graph,
    reweight,
    knn_graph,
    filter_edges,
)
from .directed import (
    AugmentedDigraph,
    StationaryDistribution,
    DirectedEncodingTree,
    augment_strongly_connected,
    stationary_distribution,
    directed_one_dim_entropy,
    directed_node_entropy,
    directed_tree_entropy,
    flat_directed_tree,
    optimize_directed,
    optimize_directed_trace,
)
from .abstraction import (
    AbstractionResult,
    AssignmentMatrices,
    aggregate,
    abstraction_map,
    depth_cut,
    cut_assignments,
    soft_assignments,
    kl_clustering_loss,
)
from .skills import (
    Step,
    TrajectoryLog,
    TransitionGraph,
    Skill,
    build_transition_graph,
    transition_probability,
    extract_skills,
    correlation_reconstruction,
)
from .gridworld import (
    GridworldEnv,
    TabularAgent,
    OfflineDataset,
    OfflineAbstraction,
    EvaluationReport,
    collect_offline,
    run_offline_abstraction,
    evaluate,
)

__version__ = "0.1.0"
