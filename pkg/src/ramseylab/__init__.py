"""Oriented Ramsey laboratory: generators, structure builders, embedders and
exact small-scale oracles for layered digraphs inside tournaments."""

__version__ = "0.1.0"

from .digraphs import (
    Digraph,
    Layering,
    compute_layering,
    grid_digraph,
    hypercube_digraph,
    path_digraph,
    random_layered_digraph,
)
from .tournaments import (
    Tournament,
    median_order_exact,
    median_order_local,
    random_tournament,
    rotational_tournament,
    transitive_tournament,
)
from .communities import MonotoneFamily, dependent_random_choice, is_community
from .census import census_counts, contains_digraph, oriented_ramsey_exact
from .structure import (
    GradedParams,
    StructureParams,
    build_graded_structure,
    build_structure,
)
from .embedding import (
    Embedding,
    backtracking_embed,
    embed_graded_pipeline,
    embed_pipeline,
    lll_embed_layer,
    verify_embedding,
)
from .lowerbound import (
    build_D0_and_R,
    build_height_h_guest,
    build_lower_host,
    check_host_property,
    front_index_diagnostic,
    verify_no_embedding,
)
from .profiles import run_desk_graded_pipeline, run_desk_pipeline

__all__ = [
    "Digraph",
    "Embedding",
    "GradedParams",
    "Layering",
    "MonotoneFamily",
    "StructureParams",
    "Tournament",
    "backtracking_embed",
    "build_D0_and_R",
    "build_graded_structure",
    "build_height_h_guest",
    "build_lower_host",
    "build_structure",
    "census_counts",
    "check_host_property",
    "compute_layering",
    "contains_digraph",
    "dependent_random_choice",
    "embed_graded_pipeline",
    "embed_pipeline",
    "front_index_diagnostic",
    "grid_digraph",
    "hypercube_digraph",
    "is_community",
    "lll_embed_layer",
    "median_order_exact",
    "median_order_local",
    "oriented_ramsey_exact",
    "path_digraph",
    "random_layered_digraph",
    "random_tournament",
    "rotational_tournament",
    "run_desk_graded_pipeline",
    "run_desk_pipeline",
    "transitive_tournament",
    "verify_embedding",
    "verify_no_embedding",
]
