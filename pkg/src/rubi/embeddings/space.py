"""Monolingual embedding spaces."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class Normalization(str, Enum):
    """Normalisation state of an embedding space."""

    RAW = "raw"
    L2 = "l2"
    CENTER_L2 = "center_l2"


@dataclass(frozen=True)
class LoadReport:
    """What the loader skipped while reading a vector file."""

    rows_read: int = 0
    duplicates: int = 0
    malformed: int = 0
    duplicate_tokens: tuple[str, ...] = ()


@dataclass(frozen=True)
class EmbeddingSpace:
    """Vocabulary plus an n x d matrix of word vectors, in file (frequency) order.

    Instances are immutable: the vector matrix is flagged read-only so a space
    can be shared between workers.
    """

    words: tuple[str, ...]
    vectors: np.ndarray
    lang_tag: str = ""
    normalized: Normalization = Normalization.RAW
    zero_rows: tuple[int, ...] = ()
    report: Optional[LoadReport] = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vectors = np.array(self.vectors, dtype=np.float64, copy=True)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be a 2-D matrix, got shape {vectors.shape}")
        if vectors.shape[0] != len(self.words):
            raise ValueError(
                f"{len(self.words)} words but {vectors.shape[0]} vector rows"
            )
        index: dict[str, int] = {}
        for i, word in enumerate(self.words):
            if word in index:
                raise ValueError(f"duplicate token {word!r}")
            index[word] = i
        vectors.setflags(write=False)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        """Dimension d of every vector."""
        return int(self.vectors.shape[1])

    def lookup(self, token: str) -> Optional[int]:
        """Row index of ``token`` (exact, case-sensitive match) or None."""
        return self._index.get(token)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def vector(self, token: str) -> np.ndarray:
        """Vector of ``token``; raises KeyError when absent."""
        return self.vectors[self._index[token]]

    def subset(self, rows: Sequence[int]) -> "EmbeddingSpace":
        """New space holding only ``rows``, in the given order."""
        rows = list(rows)
        zero = set(self.zero_rows)
        return EmbeddingSpace(
            words=tuple(self.words[i] for i in rows),
            vectors=self.vectors[rows],
            lang_tag=self.lang_tag,
            normalized=self.normalized,
            zero_rows=tuple(j for j, i in enumerate(rows) if i in zero),
        )

    def nonzero_mask(self) -> np.ndarray:
        """Boolean mask of rows that may take part in neighbour statistics."""
        mask = np.ones(len(self.words), dtype=bool)
        mask[list(self.zero_rows)] = False
        return mask


def normalize(space: EmbeddingSpace, mode: Normalization | str) -> EmbeddingSpace:
    """Unit-normalise rows, optionally after removing the column mean.

    Zero rows stay zero and are listed in ``zero_rows`` so row indices keep
    matching the dictionary.
    """
    mode = Normalization(mode)
    if mode is Normalization.RAW:
        raise ValueError("normalize() needs mode 'l2' or 'center_l2'")
    if space.normalized is not Normalization.RAW:
        logger.debug("re-normalising a space already in state %s", space.normalized.value)

    vectors = np.array(space.vectors, dtype=np.float64)
    if mode is Normalization.CENTER_L2:
        vectors = vectors - vectors.mean(axis=0, keepdims=True)

    norms = np.linalg.norm(vectors, axis=1)
    zero = norms <= np.finfo(np.float64).tiny
    norms[zero] = 1.0
    vectors = vectors / norms[:, None]
    vectors[zero] = 0.0

    zero_rows = tuple(int(i) for i in np.flatnonzero(zero))
    if zero_rows:
        logger.warning(
            "%s: %d zero vector(s) kept but excluded from neighbour statistics",
            space.lang_tag or "space", len(zero_rows),
        )

    return EmbeddingSpace(
        words=space.words,
        vectors=vectors,
        lang_tag=space.lang_tag,
        normalized=mode,
        zero_rows=zero_rows,
        report=space.report,
    )


def lookup(space: EmbeddingSpace, token: str) -> Optional[int]:
    """Row index of ``token`` in ``space`` or None."""
    return space.lookup(token)
