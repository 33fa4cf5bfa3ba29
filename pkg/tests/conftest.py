"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from rubi.embeddings import EmbeddingSpace, Normalization, normalize


@pytest.fixture
def rng():
    """Seeded generator so every test sees the same numbers."""
    return np.random.default_rng(1234)


@pytest.fixture
def write_text(tmp_path):
    """Write a small text fixture and return its path."""

    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path

    return _write


def unit_space(vectors: np.ndarray, prefix: str = "w", lang: str = "xx") -> EmbeddingSpace:
    """l2-normalised space with tokens prefix0, prefix1, ..."""
    raw = EmbeddingSpace(
        words=tuple(f"{prefix}{i}" for i in range(len(vectors))),
        vectors=vectors,
        lang_tag=lang,
    )
    return normalize(raw, Normalization.L2)


@pytest.fixture
def random_space(rng):
    """40 random unit vectors in 8 dimensions."""
    return unit_space(rng.normal(size=(40, 8)))


@pytest.fixture
def make_space():
    """Factory for l2-normalised spaces built from raw vectors."""
    return unit_space
