"""Similarity criteria for lexicon induction: cosine, CSLS and inverted softmax."""

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import logsumexp

from ..alignment import AlignmentMap
from ..embeddings import EmbeddingSpace
from ..errors import InputError

logger = logging.getLogger(__name__)

DEFAULT_TILE = 512


def cosine_sim(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u| |v|); zero vectors are rejected."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise InputError("cosine similarity is undefined for a zero vector")
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-normalise, leaving zero rows at zero."""
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return matrix / norms


def map_space(Q: AlignmentMap, Xsrc: EmbeddingSpace) -> np.ndarray:
    """Source vectors mapped into the target space, re-normalised to unit length."""
    return unit_rows(Q.apply(Xsrc.vectors))


def _tiles(n: int, tile: int) -> Iterator[slice]:
    for start in range(0, n, tile):
        yield slice(start, min(start + tile, n))


def top_k_means(
    A: np.ndarray,
    B: np.ndarray,
    k_max: int,
    *,
    exclude_self: bool = False,
    b_mask: np.ndarray | None = None,
    tile: int = DEFAULT_TILE,
) -> np.ndarray:
    """Column K-1 holds, for every row of A, the mean of its K largest dot products with B.

    A x B is processed ``tile`` rows at a time and never materialised whole.
    ``exclude_self`` drops the diagonal (A and B index the same words);
    rows of B outside ``b_mask`` never count as neighbours.
    """
    out = np.empty((A.shape[0], k_max))
    divisors = np.arange(1, k_max + 1)
    for rows in _tiles(A.shape[0], tile):
        sims = A[rows] @ B.T
        if exclude_self:
            idx = np.arange(rows.start, rows.stop)
            sims[idx - rows.start, idx] = -np.inf
        if b_mask is not None:
            sims[:, ~b_mask] = -np.inf
        top = -np.partition(-sims, k_max - 1, axis=1)[:, :k_max]
        top = -np.sort(-top, axis=1)
        out[rows] = np.cumsum(top, axis=1) / divisors
    return out


@dataclass(frozen=True)
class NeighborhoodStats:
    """Mean similarity of each word to its K nearest cross-lingual neighbours.

    ``r_source[s]`` is r_T(W x_s), taken over target words; ``r_target[t]`` is
    r_S(y_t), taken over mapped source words.
    """

    r_source: np.ndarray
    r_target: np.ndarray
    k: int


def neighborhood_stats_range(
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    k_max: int,
    tile: int = DEFAULT_TILE,
) -> list[NeighborhoodStats]:
    """Stats for every K in 1..k_max, from a single top-k pass in each direction."""
    same_space = Xsrc is Ytgt
    src_ok, tgt_ok = Xsrc.nonzero_mask(), Ytgt.nonzero_mask()
    pool_src = int(src_ok.sum()) - (1 if same_space else 0)
    pool_tgt = int(tgt_ok.sum()) - (1 if same_space else 0)
    if k_max < 1 or k_max > min(pool_src, pool_tgt):
        raise InputError(
            f"K={k_max} out of range: neighbourhoods hold at most "
            f"{min(pool_src, pool_tgt)} word(s)"
        )
    mapped = map_space(Q, Xsrc)
    targets = Ytgt.vectors
    r_source = top_k_means(
        mapped, targets, k_max, exclude_self=same_space, b_mask=tgt_ok, tile=tile
    )
    r_target = top_k_means(
        targets, mapped, k_max, exclude_self=same_space, b_mask=src_ok, tile=tile
    )
    return [
        NeighborhoodStats(r_source[:, k - 1].copy(), r_target[:, k - 1].copy(), k)
        for k in range(1, k_max + 1)
    ]


def compute_neighborhood_stats(
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    K: int,
    tile: int = DEFAULT_TILE,
) -> NeighborhoodStats:
    """Exact top-K neighbourhood means in both directions."""
    return neighborhood_stats_range(Q, Xsrc, Ytgt, K, tile)[-1]


def csls_score(
    x_mapped: np.ndarray,
    y: np.ndarray,
    stats: NeighborhoodStats,
    source_row: int,
    target_row: int,
) -> float:
    """2 cos(Wx_s, y_t) - r_T(Wx_s) - r_S(y_t), no clamping."""
    if not (0 <= source_row < len(stats.r_source)) or not (0 <= target_row < len(stats.r_target)):
        raise InputError(
            f"no neighbourhood stats for source row {source_row} / target row {target_row}"
        )
    return 2.0 * cosine_sim(x_mapped, y) - float(stats.r_source[source_row]) - float(
        stats.r_target[target_row]
    )


def csls_matrix(
    mapped_rows: np.ndarray,
    targets: np.ndarray,
    stats: NeighborhoodStats,
    source_rows: np.ndarray,
) -> np.ndarray:
    """CSLS of every (source row, target word) pair; mapped rows must be unit length."""
    sims = mapped_rows @ targets.T
    return 2.0 * sims - stats.r_source[source_rows, None] - stats.r_target[None, :]


@dataclass(frozen=True)
class IsfPartition:
    """Per-target log partition log sum_s exp(beta cos(Wx_s, y_t)) over all sources."""

    log_z: np.ndarray
    beta: float


def compute_isf_partition(
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    beta: float = 30.0,
    tile: int = DEFAULT_TILE,
) -> IsfPartition:
    """Column-wise softmax normalisers for the inverted softmax."""
    if beta <= 0:
        raise InputError(f"ISF temperature beta must be > 0, got {beta}")
    mapped = map_space(Q, Xsrc)
    log_z = np.empty(len(Ytgt))
    for rows in _tiles(len(Ytgt), tile):
        log_z[rows] = logsumexp(beta * (Ytgt.vectors[rows] @ mapped.T), axis=1)
    return IsfPartition(log_z=log_z, beta=beta)


def isf_score(
    x_mapped: np.ndarray,
    y: np.ndarray,
    beta: float,
    partition_cache: IsfPartition,
    target_row: int,
) -> float:
    """exp(beta cos(Wx_s, y_t)) normalised over all sources competing for y_t."""
    if beta <= 0:
        raise InputError(f"ISF temperature beta must be > 0, got {beta}")
    if beta != partition_cache.beta:
        raise InputError("partition cache was computed with a different beta")
    return float(np.exp(beta * cosine_sim(x_mapped, y) - partition_cache.log_z[target_row]))


def isf_matrix(mapped_rows: np.ndarray, targets: np.ndarray, partition: IsfPartition) -> np.ndarray:
    """Log inverted-softmax scores; monotone in the ISF probability."""
    return partition.beta * (mapped_rows @ targets.T) - partition.log_z[None, :]


def hub_in_degree(top1_targets: np.ndarray) -> int:
    """Largest number of source words sharing the same top-1 target."""
    top1_targets = np.asarray(top1_targets)
    if top1_targets.size == 0:
        return 0
    return int(np.bincount(top1_targets).max())
