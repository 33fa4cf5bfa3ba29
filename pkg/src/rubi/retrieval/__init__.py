"""Post-alignment retrieval: NN, CSLS, ISF, candidate lists and ranker features."""

from .candidates import (
    CandidateList,
    Criterion,
    extract_features,
    feature_names,
    generate_candidates,
    read_candidates_tsv,
    write_candidates_tsv,
    write_features_csv,
)
from .neighborhoods import (
    IsfPartition,
    NeighborhoodStats,
    compute_isf_partition,
    compute_neighborhood_stats,
    cosine_sim,
    csls_matrix,
    csls_score,
    hub_in_degree,
    isf_matrix,
    isf_score,
    map_space,
    neighborhood_stats_range,
    top_k_means,
    unit_rows,
)

__all__ = [
    "CandidateList",
    "Criterion",
    "IsfPartition",
    "NeighborhoodStats",
    "compute_isf_partition",
    "compute_neighborhood_stats",
    "cosine_sim",
    "csls_matrix",
    "csls_score",
    "extract_features",
    "feature_names",
    "generate_candidates",
    "hub_in_degree",
    "isf_matrix",
    "isf_score",
    "map_space",
    "neighborhood_stats_range",
    "read_candidates_tsv",
    "top_k_means",
    "unit_rows",
    "write_candidates_tsv",
    "write_features_csv",
]
