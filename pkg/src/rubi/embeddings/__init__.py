"""Embedding spaces: loading, normalisation and vocabulary lookup."""

from .io import load_embeddings, save_embeddings
from .space import EmbeddingSpace, LoadReport, Normalization, lookup, normalize

__all__ = [
    "EmbeddingSpace",
    "LoadReport",
    "Normalization",
    "load_embeddings",
    "lookup",
    "normalize",
    "save_embeddings",
]
