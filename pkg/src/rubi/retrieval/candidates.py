"""Candidate translation lists and the ranker's feature vectors."""

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..alignment import AlignmentMap
from ..embeddings import EmbeddingSpace
from ..errors import InputError
from .neighborhoods import (
    DEFAULT_TILE,
    IsfPartition,
    NeighborhoodStats,
    csls_matrix,
    isf_matrix,
    map_space,
)

logger = logging.getLogger(__name__)


class Criterion(str, Enum):
    """Deterministic retrieval criterion."""

    NN = "nn"
    CSLS = "csls"
    ISF = "isf"


@dataclass(frozen=True)
class CandidateList:
    """One source word with its q best target words, best first."""

    source_word: str
    candidates: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        tokens = [t for t, _ in self.candidates]
        if len(set(tokens)) != len(tokens):
            raise InputError(f"duplicate candidates for {self.source_word!r}")
        scores = [s for _, s in self.candidates]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise InputError(f"candidates for {self.source_word!r} are not sorted by score")

    @property
    def tokens(self) -> list[str]:
        return [t for t, _ in self.candidates]

    def __len__(self) -> int:
        return len(self.candidates)


def generate_candidates(
    source_rows: Sequence[int],
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    q: int,
    criterion: Criterion | str = Criterion.NN,
    *,
    stats: Optional[NeighborhoodStats] = None,
    partition: Optional[IsfPartition] = None,
    tile: int = DEFAULT_TILE,
) -> list[CandidateList]:
    """Top-q target words of every source row under ``criterion``.

    Equal scores keep the lower target index first, so repeated calls return
    identical lists.
    """
    criterion = Criterion(criterion)
    if q < 1 or q > len(Ytgt):
        raise InputError(f"query size q={q} must lie in 1..{len(Ytgt)}")
    if criterion is Criterion.CSLS and stats is None:
        raise InputError("CSLS candidates need neighbourhood stats")
    if criterion is Criterion.ISF and partition is None:
        raise InputError("ISF candidates need a partition cache")

    rows = np.asarray(source_rows, dtype=np.int64)
    mapped_all = map_space(Q, Xsrc)
    targets = Ytgt.vectors
    lists: list[CandidateList] = []
    for start in range(0, len(rows), tile):
        chunk = rows[start:start + tile]
        mapped = mapped_all[chunk]
        if criterion is Criterion.NN:
            scores = mapped @ targets.T
        elif criterion is Criterion.CSLS:
            assert stats is not None
            scores = csls_matrix(mapped, targets, stats, chunk)
        else:
            assert partition is not None
            scores = isf_matrix(mapped, targets, partition)

        for row, row_scores in zip(chunk, scores):
            if q < len(row_scores):
                top = np.argpartition(-row_scores, q - 1)[:q]
            else:
                top = np.arange(len(row_scores))
            order = top[np.lexsort((top, -row_scores[top]))]
            lists.append(CandidateList(
                source_word=Xsrc.words[row],
                candidates=tuple((Ytgt.words[j], float(row_scores[j])) for j in order),
            ))
    return lists


def feature_names(k_max: int) -> list[str]:
    """Column names of a feature vector: cosine, then CSLS with K = 1..k_max."""
    return ["cosine"] + [f"csls_{k}" for k in range(1, k_max + 1)]


def extract_features(
    cand: CandidateList,
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    k_max: int,
    stats_per_k: Sequence[NeighborhoodStats],
) -> np.ndarray:
    """Feature matrix (one row per candidate) of width 1 + k_max.

    Column 0 is cos(W x, y); for unit vectors it ranks exactly like the
    negated Euclidean distance. Column i is CSLS with neighbourhood size i.
    """
    if len(stats_per_k) < k_max or any(stats_per_k[i].k != i + 1 for i in range(k_max)):
        raise InputError(f"need neighbourhood stats for every K in 1..{k_max}")
    s = Xsrc.lookup(cand.source_word)
    if s is None:
        raise InputError(f"source word {cand.source_word!r} not in the source vocabulary")
    t_rows = []
    for token in cand.tokens:
        t = Ytgt.lookup(token)
        if t is None:
            raise InputError(f"candidate {token!r} not in the target vocabulary")
        t_rows.append(t)
    t_idx = np.asarray(t_rows, dtype=np.int64)

    mapped = Q.apply(Xsrc.vectors[s])
    norm = np.linalg.norm(mapped)
    mapped = mapped / norm if norm > 0 else mapped
    cos = Ytgt.vectors[t_idx] @ mapped

    features = np.empty((len(t_idx), 1 + k_max))
    features[:, 0] = cos
    for k in range(1, k_max + 1):
        st = stats_per_k[k - 1]
        features[:, k] = 2.0 * cos - st.r_source[s] - st.r_target[t_idx]
    if not np.all(np.isfinite(features)):
        raise InputError(f"non-finite features for {cand.source_word!r}")
    return features


def write_candidates_tsv(lists: Sequence[CandidateList], path: Path | str) -> None:
    """``source<TAB>cand1<TAB>score1<TAB>...`` one line per source word."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for cl in lists:
            cells = [cl.source_word]
            for token, score in cl.candidates:
                cells += [token, f"{score:.17g}"]
            f.write("\t".join(cells) + "\n")


def read_candidates_tsv(path: Path | str) -> list[CandidateList]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"candidate file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            lines = list(f)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read candidates {path}: {exc}") from exc
    lists = []
    for line_no, line in enumerate(lines, start=1):
        cells = line.rstrip("\n").split("\t")
        if len(cells) < 3 or len(cells) % 2 != 1:
            raise InputError(f"{path}:{line_no}: expected source followed by token/score pairs")
        try:
            pairs = tuple(
                (cells[i], float(cells[i + 1])) for i in range(1, len(cells), 2)
            )
        except ValueError:
            raise InputError(f"{path}:{line_no}: unparsable score") from None
        lists.append(CandidateList(cells[0], pairs))
    return lists


def write_features_csv(
    path: Path | str,
    lists: Sequence[CandidateList],
    features: Sequence[np.ndarray],
    labels: Optional[Sequence[np.ndarray]] = None,
) -> None:
    """One CSV row per (query, candidate) with a header naming every feature."""
    if not features:
        raise InputError("no features to write")
    k_max = features[0].shape[1] - 1
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["query", "candidate", "label"] + feature_names(k_max))
        for i, (cl, feats) in enumerate(zip(lists, features)):
            for j, token in enumerate(cl.tokens):
                label = "" if labels is None else str(int(labels[i][j]))
                writer.writerow(
                    [cl.source_word, token, label] + [f"{v:.17g}" for v in feats[j]]
                )
