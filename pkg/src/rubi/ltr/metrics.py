"""Ranking metrics on integer relevance labels."""

from typing import Collection, Sequence

import numpy as np

ArrayLike = Sequence[int] | np.ndarray


def ranking_from_scores(scores: Sequence[float] | np.ndarray) -> np.ndarray:
    """Item indices from best to worst score; ties keep the lower index first."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def dcg_at_k(labels: ArrayLike, ranking: ArrayLike, k: int) -> float:
    """sum over the top-k ranks r (1-based) of (2^label - 1) / log2(1 + r)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    labels = np.asarray(labels, dtype=np.float64)
    top = np.asarray(ranking, dtype=np.int64)[:k]
    gains = np.power(2.0, labels[top]) - 1.0
    discounts = np.log2(np.arange(2, top.size + 2))
    return float(np.sum(gains / discounts))


def ndcg_at_k(labels: ArrayLike, ranking: ArrayLike, k: int) -> float:
    """DCG@k relative to the ideal ordering; 0 when every label is 0."""
    labels = np.asarray(labels, dtype=np.float64)
    ideal = dcg_at_k(labels, np.argsort(-labels, kind="stable"), k)
    if ideal == 0.0:
        return 0.0
    return dcg_at_k(labels, ranking, k) / ideal


def hit_at_k(ranked_tokens: Sequence[str], gold: Collection[str], k: int) -> bool:
    """True when any of the first k tokens is a gold translation."""
    return any(token in gold for token in ranked_tokens[:k])


def precision_at_k(
    ranked: Sequence[Sequence[str]],
    gold: Sequence[Collection[str]],
    k: int,
) -> float:
    """Fraction of queries with a gold translation among their first k tokens."""
    if len(ranked) != len(gold):
        raise ValueError(f"{len(ranked)} ranked lists but {len(gold)} gold sets")
    if not ranked:
        raise ValueError("precision needs at least one query")
    hits = sum(hit_at_k(tokens, answers, k) for tokens, answers in zip(ranked, gold))
    return hits / len(ranked)
