"""Groupwise MLP scorer.

A model with group size m reads the concatenated features of m items and
emits one score per slot. To score a list of any length the items are
shuffled with the model seed, tiled into groups of m (wrapping around to
fill the last group) and every group is fed under each of its m cyclic
rotations, so each item visits every input slot. An item's score is the
mean over all of its appearances.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, Literal

import numpy as np
import torch
from torch import nn

from ..errors import InputError
from .models import RankingQuery, TrainConfig

logger = logging.getLogger(__name__)

MODEL_FORMAT = "rubi-ranker v1"

Mode = Literal["train", "eval"]


class RankerModel(nn.Module):
    """MLP from m x feature_dim inputs to m scores, in float64."""

    def __init__(
        self,
        feature_dim: int,
        group_size: int = 4,
        hidden: Iterable[int] = (256, 128, 64),
        dropout_rate: float = 0.5,
        seed: int = 0,
    ):
        super().__init__()
        hidden = tuple(int(h) for h in hidden)
        if feature_dim < 1:
            raise InputError(f"feature_dim must be >= 1, got {feature_dim}")
        if group_size < 1:
            raise InputError(f"group_size must be >= 1, got {group_size}")
        if not 0.0 <= dropout_rate < 1.0:
            raise InputError(f"dropout_rate must be in [0, 1), got {dropout_rate}")
        if any(h < 1 for h in hidden):
            raise InputError(f"hidden widths must be positive, got {hidden}")

        self.feature_dim = feature_dim
        self.group_size = group_size
        self.hidden = hidden
        self.dropout_rate = dropout_rate
        self.seed = seed

        widths = (feature_dim * group_size,) + hidden
        layers: list[nn.Module] = []
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            for fan_in, fan_out in zip(widths[:-1], widths[1:]):
                layers += [
                    nn.Linear(fan_in, fan_out, dtype=torch.float64),
                    nn.ReLU(),
                    nn.Dropout(dropout_rate),
                ]
            layers.append(nn.Linear(widths[-1], group_size, dtype=torch.float64))
        self.net = nn.Sequential(*layers)

    @classmethod
    def from_config(cls, feature_dim: int, cfg: TrainConfig) -> "RankerModel":
        return cls(
            feature_dim,
            group_size=cfg.group_size,
            hidden=cfg.hidden,
            dropout_rate=cfg.dropout_rate,
            seed=cfg.seed,
        )

    def header(self) -> dict:
        return {
            "feature_dim": self.feature_dim,
            "group_size": self.group_size,
            "hidden": list(self.hidden),
            "dropout_rate": self.dropout_rate,
            "seed": self.seed,
        }

    def forward(self, groups: torch.Tensor) -> torch.Tensor:
        """[G, m * feature_dim] group inputs to [G, m] slot scores."""
        return self.net(groups)


def group_layout(n: int, group_size: int, seed: int) -> np.ndarray:
    """Item indices fed per forward pass, shape [m * ceil(n/m), m]."""
    if n == 0:
        return np.zeros((0, group_size), dtype=np.int64)
    order = np.random.default_rng(seed).permutation(n)
    n_groups = -(-n // group_size)
    base = np.resize(order, n_groups * group_size).reshape(n_groups, group_size)
    rotations = [np.roll(base, -r, axis=1) for r in range(group_size)]
    return np.concatenate(rotations, axis=0).astype(np.int64)


def groupwise_scores(model: RankerModel, features: torch.Tensor) -> torch.Tensor:
    """Differentiable per-item scores for an [n, feature_dim] tensor."""
    n = features.shape[0]
    if features.dim() != 2 or features.shape[1] != model.feature_dim:
        raise InputError(
            f"expected features of width {model.feature_dim}, got shape {tuple(features.shape)}"
        )
    if n == 0:
        return features.new_zeros(0)
    layout = torch.from_numpy(group_layout(n, model.group_size, model.seed))
    inputs = features[layout].reshape(layout.shape[0], -1)
    outputs = model(inputs)
    flat = layout.reshape(-1)
    totals = features.new_zeros(n).index_add(0, flat, outputs.reshape(-1))
    counts = torch.bincount(flat, minlength=n).to(features.dtype)
    return totals / counts


def forward_scores(
    model: RankerModel,
    features: np.ndarray | torch.Tensor,
    mode: Mode = "eval",
    step: int = 0,
) -> torch.Tensor:
    """Scores with dropout seeded by model.seed + step in train mode, none in eval mode."""
    features = torch.as_tensor(features, dtype=torch.float64)
    if mode == "eval":
        model.eval()
        return groupwise_scores(model, features)
    model.train()
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(model.seed + step)
        return groupwise_scores(model, features)


def score_query(
    model: RankerModel,
    query: RankingQuery,
    mode: Mode = "eval",
    step: int = 0,
) -> np.ndarray:
    """Per-item scores of ``query``; padded slots get -inf."""
    if query.feature_dim != model.feature_dim:
        raise InputError(
            f"query {query.query_id!r} has {query.feature_dim} features, "
            f"model expects {model.feature_dim}"
        )
    assert query.mask is not None
    scores = np.full(len(query), -np.inf)
    with torch.no_grad():
        valid = forward_scores(model, query.valid_features, mode, step)
    scores[query.mask] = valid.numpy()
    return scores


def save_model(model: RankerModel, path: Path | str) -> None:
    """Write the versioned text model file; identical weights give identical bytes."""
    lines = [MODEL_FORMAT, json.dumps(model.header(), sort_keys=True)]
    for name, tensor in model.state_dict().items():
        shape = " ".join(str(s) for s in tensor.shape)
        lines.append(f"{name} {shape}")
        lines.append(" ".join(f"{v:.17g}" for v in tensor.reshape(-1).tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: Path | str) -> RankerModel:
    """Read a model written by :func:`save_model`."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read model {path}: {exc}") from exc
    if not lines or lines[0] != MODEL_FORMAT:
        raise InputError(f"{path}: not a {MODEL_FORMAT!r} model file")
    try:
        header = json.loads(lines[1])
        model = RankerModel(**header)
        state = {}
        for name_line, values_line in zip(lines[2::2], lines[3::2]):
            name, *dims = name_line.split()
            shape = tuple(int(d) for d in dims)
            values = [float(v) for v in values_line.split()]
            state[name] = torch.tensor(values, dtype=torch.float64).reshape(shape)
        model.load_state_dict(state)
    except (IndexError, ValueError, TypeError, RuntimeError) as exc:
        raise InputError(f"{path}: corrupt model file ({exc})") from exc
    logger.debug("loaded ranker %s from %s", header, path)
    return model
