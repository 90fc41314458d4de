"""Permutons from space-filling grid curves, and the road back.

The library builds measures on the unit square, runs grid-filling
curves through them at unit mass speed, couples two such clocks into a
permuton, and then walks the reconstruction in reverse: support,
saturated support, rank contact relation, cell graph, boundary walk,
harmonic embedding, and a log-density field read off ball masses.
Desk-scale permutation ensembles and correlated-walk matings round out
the toolkit. Everything is deterministic given a single seed.
"""

from .config import DEFAULTS, PIPELINES, RunConfig, build_config, parse_config_file
from .curves import (
    CURVE_KINDS,
    SYMMETRIES,
    CellCurve,
    TimedCurve,
    apply_symmetry,
    build_curve,
    conjugate,
    induced_permutation,
    mass_parametrize,
)
from .embedding import (
    TutteEmbedding,
    align_embeddings,
    harmonic_measure,
    marked_rank,
    mc_harmonic_oracle,
    tutte_embedding,
)
from .ensembles import (
    PermutationEnsemble,
    enumerate_all,
    enumerate_baxter,
    enumerate_meanders,
    is_baxter,
    reroot_permutation,
    sample_baxter,
)
from .graphs import CellGraph, components, interval_subgraph, side_sharing_graph
from .intersections import (
    IntersectionSet,
    TimeSet,
    boundary_bipartition,
    boundary_path,
    boundary_times,
    cut_times,
    graph_from_tm,
    tm_add_outer_frame,
    tm_from_augmented,
    tm_oracle_from_curve,
)
from .measures import (
    MEASURE_KINDS,
    GridMeasure,
    background_charge,
    build_measure,
    coupling_rho,
    log_mass_field,
    mass_of_region,
)
from .permutons import (
    AugmentedSupport,
    Permuton,
    SupportSet,
    augment_support,
    permuton_from_pair,
    permuton_from_permutation,
    reroot_permuton,
    support_of,
)
from .pipeline import (
    PipelineError,
    cascade_recovery_error,
    embedding_distortion,
    mc_harmonic_parallel,
    normalized_cell_centers,
    run_pipeline,
    run_stage,
    support_chain_sets,
)
from .rng import stage_rng, stage_seed
from .walks import (
    WalkPair,
    mated_crt_graph,
    mated_crt_graph_bruteforce,
    sample_walk_pair,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULTS",
    "PIPELINES",
    "RunConfig",
    "build_config",
    "parse_config_file",
    "CURVE_KINDS",
    "SYMMETRIES",
    "CellCurve",
    "TimedCurve",
    "apply_symmetry",
    "build_curve",
    "conjugate",
    "induced_permutation",
    "mass_parametrize",
    "TutteEmbedding",
    "align_embeddings",
    "harmonic_measure",
    "marked_rank",
    "mc_harmonic_oracle",
    "tutte_embedding",
    "PermutationEnsemble",
    "enumerate_all",
    "enumerate_baxter",
    "enumerate_meanders",
    "is_baxter",
    "reroot_permutation",
    "sample_baxter",
    "CellGraph",
    "components",
    "interval_subgraph",
    "side_sharing_graph",
    "IntersectionSet",
    "TimeSet",
    "boundary_bipartition",
    "boundary_path",
    "boundary_times",
    "cut_times",
    "graph_from_tm",
    "tm_add_outer_frame",
    "tm_from_augmented",
    "tm_oracle_from_curve",
    "MEASURE_KINDS",
    "GridMeasure",
    "background_charge",
    "build_measure",
    "coupling_rho",
    "log_mass_field",
    "mass_of_region",
    "AugmentedSupport",
    "Permuton",
    "SupportSet",
    "augment_support",
    "permuton_from_pair",
    "permuton_from_permutation",
    "reroot_permuton",
    "support_of",
    "PipelineError",
    "cascade_recovery_error",
    "embedding_distortion",
    "mc_harmonic_parallel",
    "normalized_cell_centers",
    "run_pipeline",
    "run_stage",
    "support_chain_sets",
    "stage_rng",
    "stage_seed",
    "WalkPair",
    "mated_crt_graph",
    "mated_crt_graph_bruteforce",
    "sample_walk_pair",
    "__version__",
]
