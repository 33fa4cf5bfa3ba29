"""Ranking queries and training settings."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import InputError


class LossName(str, Enum):
    """Ranking losses the trainer can optimise."""

    SIGMOID_CE = "sigmoid_ce"
    PAIRWISE_LOGISTIC = "pairwise_logistic"
    SOFTMAX_CE = "softmax_ce"
    APPROX_NDCG = "approx_ndcg"
    LIST_MLE = "list_mle"


@dataclass(frozen=True)
class RankingQuery:
    """A source word and its candidate list: one feature row and one label per item.

    ``mask`` marks real items; padded slots are False and are ignored by
    scoring, losses and metrics.
    """

    query_id: str
    features: np.ndarray
    labels: np.ndarray
    mask: Optional[np.ndarray] = None
    candidates: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels)
        if features.ndim != 2:
            raise InputError(f"query {self.query_id!r}: features must be a 2-D matrix")
        if labels.shape != (features.shape[0],):
            raise InputError(f"query {self.query_id!r}: one label per item required")
        if not np.all(np.isfinite(features)):
            raise InputError(f"query {self.query_id!r}: non-finite features")
        if labels.size and (not np.all(np.isfinite(labels)) or labels.min() < 0):
            raise InputError(f"query {self.query_id!r}: labels must be finite and non-negative")
        mask = (
            np.ones(features.shape[0], dtype=bool)
            if self.mask is None
            else np.asarray(self.mask, dtype=bool)
        )
        if mask.shape != labels.shape:
            raise InputError(f"query {self.query_id!r}: mask shape does not match the items")
        if self.candidates and len(self.candidates) != features.shape[0]:
            raise InputError(f"query {self.query_id!r}: candidate names do not match the items")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels.astype(np.int64))
        object.__setattr__(self, "mask", mask)

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def valid_features(self) -> np.ndarray:
        assert self.mask is not None
        return self.features[self.mask]

    @property
    def valid_labels(self) -> np.ndarray:
        assert self.mask is not None
        return self.labels[self.mask]

    def __len__(self) -> int:
        return int(self.features.shape[0])


class TrainConfig(BaseModel):
    """Ranker architecture, loss and Adagrad settings."""

    model_config = ConfigDict(extra="forbid")

    iterations: int = Field(100_000, ge=0)
    batch_size: int = Field(32, ge=1)
    learning_rate: float = Field(0.5, gt=0)
    epsilon: float = Field(1e-6, gt=0)
    loss: LossName = LossName.APPROX_NDCG
    # ApproxNDCG sharpness
    alpha: float = Field(10.0, gt=0)
    # ApproxNDCG cutoff; None scores the whole list
    ndcg_cutoff: Optional[int] = Field(None, ge=1)
    # cutoff of the cross-validation metric (NDCG@k)
    metric_k: int = Field(1, ge=1)
    # sigmoid_ce positive-label threshold; None uses the middle of each query's label range
    label_threshold: Optional[float] = None
    eval_every: int = Field(1000, ge=1)
    group_size: int = Field(4, ge=1)
    hidden: tuple[int, ...] = (256, 128, 64)
    dropout_rate: float = Field(0.5, ge=0, lt=1)
    seed: int = 0

    @field_validator("hidden", mode="before")
    @classmethod
    def _split_hidden(cls, value: object) -> object:
        # config files spell the widths as "256,128,64"
        if isinstance(value, str):
            return tuple(int(v) for v in value.split(",") if v.strip())
        return value
