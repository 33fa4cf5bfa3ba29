"""Adagrad training loop for the groupwise ranker."""

import copy
import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import torch

from ..errors import InputError, TrainingDiverged
from .losses import query_loss
from .metrics import ndcg_at_k, ranking_from_scores
from .models import LossName, RankingQuery, TrainConfig
from .scorer import RankerModel, forward_scores, score_query

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingPoint:
    step: int
    train_loss: float
    cv_ndcg1: float


@dataclass
class TrainingReport:
    """Checkpoints logged during training plus bookkeeping counts."""

    points: list[TrainingPoint] = field(default_factory=list)
    dropped_queries: int = 0
    best_step: Optional[int] = None
    best_cv: float = float("nan")
    steps_run: int = 0

    def to_csv(self, path: Optional[Path | str] = None) -> str:
        """``step,train_loss,cv_ndcg1`` rows; written to ``path`` when given."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["step", "train_loss", "cv_ndcg1"])
        for p in self.points:
            writer.writerow([p.step, f"{p.train_loss:.17g}", f"{p.cv_ndcg1:.17g}"])
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


@dataclass(frozen=True)
class Gradients:
    """Batch loss and the gradient of every named parameter."""

    loss: float
    grads: dict[str, torch.Tensor]

    def is_finite(self) -> bool:
        return math.isfinite(self.loss) and all(
            bool(torch.isfinite(g).all()) for g in self.grads.values()
        )


def batch_loss(
    model: RankerModel,
    batch: Sequence[RankingQuery],
    cfg: TrainConfig,
    step: int = 0,
    training: bool = True,
) -> torch.Tensor:
    """Mean query loss over ``batch``; padded items never reach the loss."""
    if not batch:
        raise InputError("empty batch")
    mode = "train" if training else "eval"
    losses = []
    for i, query in enumerate(batch):
        # one dropout stream per (step, position in batch)
        scores = forward_scores(model, query.valid_features, mode, step * len(batch) + i)
        labels = torch.as_tensor(query.valid_labels, dtype=torch.float64)
        losses.append(query_loss(labels, scores, cfg, tie_seed=cfg.seed + step + i))
    return torch.stack(losses).mean()


def backprop(
    model: RankerModel,
    batch: Sequence[RankingQuery],
    cfg: TrainConfig,
    step: int = 0,
    training: bool = True,
) -> Gradients:
    """Reverse-mode gradients of :func:`batch_loss`, left in ``p.grad`` as well.

    Raises TrainingDiverged when the loss or any gradient is non-finite.
    """
    model.zero_grad(set_to_none=False)
    loss = batch_loss(model, batch, cfg, step, training)
    loss.backward()
    grads = {
        name: (p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p))
        for name, p in model.named_parameters()
    }
    result = Gradients(loss=float(loss.detach()), grads=grads)
    if not result.is_finite():
        bad = [name for name, g in grads.items() if not bool(torch.isfinite(g).all())]
        raise TrainingDiverged(
            f"non-finite loss/gradient at step {step} (loss={result.loss}, parameters={bad})",
            stage="train",
        )
    return result


def evaluate_ndcg(model: RankerModel, queries: Sequence[RankingQuery], k: int = 1) -> float:
    """Mean NDCG@k of the eval-mode ranking over ``queries``."""
    if not queries:
        return float("nan")
    values = []
    for query in queries:
        scores = score_query(model, query, mode="eval")
        assert query.mask is not None
        values.append(ndcg_at_k(query.valid_labels, ranking_from_scores(scores[query.mask]), k))
    return float(np.mean(values))


def dataset_threshold(dataset: Sequence[RankingQuery]) -> float:
    """Middle of the label range over every query, 0.5 when all labels agree."""
    labels = np.concatenate([q.valid_labels for q in dataset])
    lo, hi = float(labels.min()), float(labels.max())
    return (lo + hi) / 2.0 if hi > lo else 0.5


def _check_dataset(dataset: Sequence[RankingQuery]) -> int:
    if not dataset:
        raise InputError("training needs at least one query")
    dims = {q.feature_dim for q in dataset}
    if len(dims) != 1:
        raise InputError(f"queries disagree on feature width: {sorted(dims)}")
    return dims.pop()


def train(
    dataset: Sequence[RankingQuery],
    cfg: TrainConfig,
    cv_set: Optional[Sequence[RankingQuery]] = None,
) -> tuple[RankerModel, TrainingReport]:
    """Train a ranker with Adagrad; returns the snapshot with the best cv NDCG.

    Queries whose labels are all zero have no ideal DCG; they are dropped and
    counted. Without a cv set the training queries are used for monitoring.
    """
    feature_dim = _check_dataset(dataset)
    kept = [q for q in dataset if q.valid_labels.size and q.valid_labels.max() > 0]
    report = TrainingReport(dropped_queries=len(dataset) - len(kept))
    if report.dropped_queries:
        logger.info("dropped %d all-zero-label queries", report.dropped_queries)
    if not kept:
        raise InputError("every training query has all-zero labels")
    if LossName(cfg.loss) is LossName.SIGMOID_CE and cfg.label_threshold is None:
        threshold = dataset_threshold(dataset)
        logger.info("sigmoid_ce binarises labels above %g", threshold)
        cfg = cfg.model_copy(update={"label_threshold": threshold})
    monitor = list(cv_set) if cv_set else kept
    if any(q.feature_dim != feature_dim for q in monitor):
        raise InputError("cv queries do not match the training feature width")

    model = RankerModel.from_config(feature_dim, cfg)
    if cfg.iterations == 0:
        return model, report

    optimizer = torch.optim.Adagrad(
        model.parameters(), lr=cfg.learning_rate, eps=cfg.epsilon
    )
    rng = np.random.default_rng(cfg.seed)
    best_state = copy.deepcopy(model.state_dict())
    best_cv = -math.inf
    running, count = 0.0, 0

    for step in range(1, cfg.iterations + 1):
        batch = [kept[i] for i in rng.integers(0, len(kept), cfg.batch_size)]
        try:
            grads = backprop(model, batch, cfg, step)
        except TrainingDiverged as exc:
            exc.report = report
            raise
        optimizer.step()
        running += grads.loss
        count += 1
        report.steps_run = step

        if step % cfg.eval_every == 0 or step == cfg.iterations:
            cv = evaluate_ndcg(model, monitor, cfg.metric_k)
            report.points.append(TrainingPoint(step, running / count, cv))
            logger.info(
                "step %d: train loss %.5f, cv NDCG@%d %.4f", step, running / count, cfg.metric_k, cv
            )
            running, count = 0.0, 0
            if cv > best_cv:
                best_cv = cv
                best_state = copy.deepcopy(model.state_dict())
                report.best_step = step

    model.load_state_dict(best_state)
    model.eval()
    report.best_cv = best_cv
    return model, report
