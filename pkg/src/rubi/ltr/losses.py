"""Ranking losses for a single query, written in torch so autograd can backprop them.

Every loss takes ``labels`` and ``scores`` as 1-D sequences over the same
items and returns a scalar tensor to minimise.
"""

from typing import Optional

import torch
import torch.nn.functional as F

from .models import LossName, TrainConfig

Tensorish = torch.Tensor | list[float] | list[int]


def _pair(labels: Tensorish, scores: Tensorish) -> tuple[torch.Tensor, torch.Tensor]:
    if not isinstance(scores, torch.Tensor):
        scores = torch.as_tensor(scores, dtype=torch.float64)
    labels = torch.as_tensor(labels, dtype=scores.dtype, device=scores.device)
    if labels.shape != scores.shape or scores.dim() != 1:
        raise ValueError(
            f"labels {tuple(labels.shape)} and scores {tuple(scores.shape)} must be equal 1-D"
        )
    return labels, scores


def loss_sigmoid_ce(
    labels: Tensorish,
    scores: Tensorish,
    threshold: Optional[float] = None,
) -> torch.Tensor:
    """Pointwise sigmoid cross entropy on binarised labels (summed over items).

    A label counts as positive when it exceeds ``threshold``; by default the
    middle of the query's label range, or 0.5 when all labels are equal.
    """
    labels, scores = _pair(labels, scores)
    if threshold is None:
        lo, hi = float(labels.min()), float(labels.max())
        threshold = (lo + hi) / 2.0 if hi > lo else 0.5
    targets = (labels > threshold).to(scores.dtype)
    return F.binary_cross_entropy_with_logits(scores, targets, reduction="sum")


def loss_pairwise_logistic(labels: Tensorish, scores: Tensorish) -> torch.Tensor:
    """sum over pairs with y_j > y_k of log(1 + exp(s_k - s_j))."""
    labels, scores = _pair(labels, scores)
    better = (labels[:, None] > labels[None, :]).to(scores.dtype)
    margins = scores[None, :] - scores[:, None]
    return (F.softplus(margins) * better).sum()


def loss_softmax_ce(labels: Tensorish, scores: Tensorish) -> torch.Tensor:
    """-sum_j y_j log softmax(s)_j; zero for a query without relevant items."""
    labels, scores = _pair(labels, scores)
    if not bool((labels > 0).any()):
        return scores.sum() * 0.0
    return -(labels * F.log_softmax(scores, dim=0)).sum()


def approx_rank(scores: Tensorish, alpha: float) -> torch.Tensor:
    """Smooth rank 1 + sum_{y != x} sigmoid(-alpha (s_x - s_y))."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not isinstance(scores, torch.Tensor):
        scores = torch.as_tensor(scores, dtype=torch.float64)
    pairwise = torch.sigmoid(-alpha * (scores[:, None] - scores[None, :]))
    # the diagonal contributes sigmoid(0) = 0.5
    return 0.5 + pairwise.sum(dim=1)


def _ideal_dcg(labels: torch.Tensor, k: Optional[int]) -> torch.Tensor:
    ideal = torch.sort(labels, descending=True).values
    if k is not None:
        ideal = ideal[:k]
    positions = torch.arange(2, ideal.numel() + 2, dtype=labels.dtype, device=labels.device)
    return ((torch.pow(2.0, ideal) - 1.0) / torch.log2(positions)).sum()


def approx_ndcg(
    labels: Tensorish,
    scores: Tensorish,
    alpha: float,
    k: Optional[int] = None,
) -> torch.Tensor:
    """Differentiable NDCG@k built on :func:`approx_rank`.

    The top-k indicator is replaced by sigmoid(alpha (k + 1/2 - rank)) so an
    item sitting exactly at rank k still counts fully in the sharp limit.
    """
    labels, scores = _pair(labels, scores)
    ideal = _ideal_dcg(labels, k)
    if float(ideal) == 0.0:
        return scores.sum() * 0.0
    ranks = approx_rank(scores, alpha)
    gains = torch.pow(2.0, labels) - 1.0
    dcg_terms = gains / torch.log2(1.0 + ranks)
    if k is not None and k < scores.numel():
        dcg_terms = dcg_terms * torch.sigmoid(alpha * (k + 0.5 - ranks))
    return dcg_terms.sum() / ideal


def loss_approx_ndcg(
    labels: Tensorish,
    scores: Tensorish,
    alpha: float,
    k: Optional[int] = None,
) -> torch.Tensor:
    """Negative ApproxNDCG."""
    return -approx_ndcg(labels, scores, alpha, k)


def loss_list_mle(labels: Tensorish, scores: Tensorish, tie_seed: int = 0) -> torch.Tensor:
    """Plackett-Luce negative log-likelihood of the label-sorted order.

    Items with equal labels are ordered by a permutation drawn from ``tie_seed``.
    """
    labels, scores = _pair(labels, scores)
    generator = torch.Generator().manual_seed(tie_seed)
    shuffle = torch.randperm(labels.numel(), generator=generator).to(labels.device)
    order = shuffle[torch.argsort(-labels[shuffle], stable=True)]
    ordered = scores[order]
    tail_lse = torch.logcumsumexp(ordered.flip(0), dim=0).flip(0)
    return (tail_lse - ordered).sum()


def query_loss(
    labels: torch.Tensor,
    scores: torch.Tensor,
    cfg: TrainConfig,
    tie_seed: int = 0,
) -> torch.Tensor:
    """Dispatch to the loss named in ``cfg``."""
    name = LossName(cfg.loss)
    if name is LossName.SIGMOID_CE:
        return loss_sigmoid_ce(labels, scores, cfg.label_threshold)
    if name is LossName.PAIRWISE_LOGISTIC:
        return loss_pairwise_logistic(labels, scores)
    if name is LossName.SOFTMAX_CE:
        return loss_softmax_ce(labels, scores)
    if name is LossName.APPROX_NDCG:
        return loss_approx_ndcg(labels, scores, cfg.alpha, cfg.ndcg_cutoff)
    return loss_list_mle(labels, scores, tie_seed)
