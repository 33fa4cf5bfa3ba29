"""Ranking datasets: building queries and reading feature CSV files."""

import csv
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..errors import InputError
from ..retrieval import CandidateList
from .models import RankingQuery

logger = logging.getLogger(__name__)


def build_queries(
    lists: Sequence[CandidateList],
    features: Sequence[np.ndarray],
    labels: Optional[Sequence[np.ndarray]] = None,
) -> list[RankingQuery]:
    """Pair every candidate list with its feature matrix and labels (zeros when unlabelled)."""
    if len(lists) != len(features) or (labels is not None and len(labels) != len(lists)):
        raise InputError("candidate lists, features and labels must have the same length")
    queries = []
    for i, (cl, feats) in enumerate(zip(lists, features)):
        query_labels = np.zeros(len(cl), dtype=np.int64) if labels is None else labels[i]
        queries.append(
            RankingQuery(
                query_id=cl.source_word,
                features=feats,
                labels=query_labels,
                candidates=tuple(cl.tokens),
            )
        )
    return queries


def read_features_csv(path: Path | str) -> list[RankingQuery]:
    """Group the rows of a feature CSV into queries, keeping file order.

    An empty label cell reads as 0 (unlabelled prediction queries).
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise InputError(f"cannot read features {path}: {exc}") from exc
    if not rows or rows[0][:3] != ["query", "candidate", "label"]:
        raise InputError(f"{path}: missing 'query,candidate,label,...' header")
    width = len(rows[0]) - 3
    if width < 1:
        raise InputError(f"{path}: no feature columns")

    grouped: dict[str, tuple[list[str], list[int], list[list[float]]]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width + 3:
            raise InputError(f"{path}:{lineno}: expected {width + 3} columns, got {len(row)}")
        query, candidate, label, *values = row
        try:
            grade = int(label) if label else 0
            feats = [float(v) for v in values]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        tokens, grades, matrix = grouped.setdefault(query, ([], [], []))
        tokens.append(candidate)
        grades.append(grade)
        matrix.append(feats)

    queries = [
        RankingQuery(
            query_id=query,
            features=np.array(matrix, dtype=np.float64),
            labels=np.array(grades, dtype=np.int64),
            candidates=tuple(tokens),
        )
        for query, (tokens, grades, matrix) in grouped.items()
    ]
    logger.debug("read %d queries from %s", len(queries), path)
    return queries
