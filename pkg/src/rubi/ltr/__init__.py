"""Learning to rank: queries, losses, metrics, the groupwise scorer and its trainer."""

from .dataset import build_queries, read_features_csv
from .losses import (
    approx_ndcg,
    approx_rank,
    loss_approx_ndcg,
    loss_list_mle,
    loss_pairwise_logistic,
    loss_sigmoid_ce,
    loss_softmax_ce,
    query_loss,
)
from .metrics import dcg_at_k, hit_at_k, ndcg_at_k, precision_at_k, ranking_from_scores
from .models import LossName, RankingQuery, TrainConfig
from .relevance import RelevanceMode, assign_relevance, label_threshold
from .scorer import (
    RankerModel,
    forward_scores,
    group_layout,
    groupwise_scores,
    load_model,
    save_model,
    score_query,
)
from .trainer import (
    Gradients,
    TrainingPoint,
    TrainingReport,
    backprop,
    batch_loss,
    dataset_threshold,
    evaluate_ndcg,
    train,
)

__all__ = [
    "Gradients",
    "LossName",
    "RankerModel",
    "RankingQuery",
    "RelevanceMode",
    "TrainConfig",
    "TrainingPoint",
    "TrainingReport",
    "approx_ndcg",
    "approx_rank",
    "assign_relevance",
    "backprop",
    "batch_loss",
    "dataset_threshold",
    "build_queries",
    "dcg_at_k",
    "evaluate_ndcg",
    "forward_scores",
    "group_layout",
    "groupwise_scores",
    "hit_at_k",
    "label_threshold",
    "load_model",
    "loss_approx_ndcg",
    "loss_list_mle",
    "loss_pairwise_logistic",
    "loss_sigmoid_ce",
    "loss_softmax_ce",
    "ndcg_at_k",
    "precision_at_k",
    "query_loss",
    "ranking_from_scores",
    "read_features_csv",
    "save_model",
    "score_query",
    "train",
]
