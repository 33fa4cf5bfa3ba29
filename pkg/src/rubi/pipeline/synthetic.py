"""Synthetic languages with known translations, for tests and offline demos."""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import ortho_group

from ..embeddings import EmbeddingSpace, Normalization, save_embeddings
from ..errors import InputError
from ..retrieval import unit_rows
from .lexicon import Lexicon, write_dictionary


@dataclass(frozen=True)
class SyntheticLanguages:
    """Several rotated, shuffled and noised copies of one base cloud.

    ``base_items[tag][row]`` is the base point that row of language ``tag``
    was generated from, so every pair of languages has an exact gold
    dictionary.
    """

    spaces: dict[str, EmbeddingSpace]
    base_items: dict[str, np.ndarray]
    rotations: dict[str, np.ndarray]

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(self.spaces)

    def lexicon(self, source: str, target: str) -> Lexicon:
        """Gold dictionary between two generated languages, in source row order."""
        src, tgt = self.spaces[source], self.spaces[target]
        row_of_item = np.empty_like(self.base_items[target])
        row_of_item[self.base_items[target]] = np.arange(len(tgt))
        entries = {
            src.words[i]: frozenset({tgt.words[int(row_of_item[item])]})
            for i, item in enumerate(self.base_items[source])
        }
        return Lexicon(entries, source, target)

    def write(
        self, directory: Path | str, pivot_pairs: Sequence[tuple[str, str]] = ()
    ) -> dict[str, Path]:
        """Write ``<tag>.vec`` per language and ``<src>-<tgt>.txt`` per requested pair."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written: dict[str, Path] = {}
        for tag, space in self.spaces.items():
            path = directory / f"{tag}.vec"
            save_embeddings(space, path)
            written[tag] = path
        for source, target in pivot_pairs:
            path = directory / f"{source}-{target}.txt"
            write_dictionary(self.lexicon(source, target), path)
            written[f"{source}-{target}"] = path
        return written


def _block_permutation(n: int, block: int, rng: np.random.Generator) -> np.ndarray:
    # rows only move within their frequency block
    return np.concatenate([
        start + rng.permutation(min(block, n - start)) for start in range(0, n, block)
    ])


def make_languages(
    tags: Sequence[str],
    n: int = 2000,
    dim: int = 50,
    noise: float = 0.01,
    seed: int = 0,
    n_clusters: int = 30,
    cluster_spread: float = 0.35,
    block: int = 100,
) -> SyntheticLanguages:
    """Generate one raw embedding space per tag from a shared clustered cloud.

    Each language applies its own random orthogonal map, a permutation that
    keeps words inside frequency blocks of ``block`` rows, and Gaussian noise
    of standard deviation ``noise``.
    """
    if len(set(tags)) != len(tags) or not tags:
        raise InputError(f"language tags must be unique and non-empty, got {list(tags)}")
    if n < 2 or dim < 2 or block < 1 or n_clusters < 1:
        raise InputError("need n >= 2, dim >= 2, block >= 1 and n_clusters >= 1")
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_clusters, dim))
    members = rng.integers(0, n_clusters, size=n)
    base = centers[members] + cluster_spread * rng.normal(size=(n, dim))

    spaces: dict[str, EmbeddingSpace] = {}
    items: dict[str, np.ndarray] = {}
    rotations: dict[str, np.ndarray] = {}
    for tag in tags:
        rotation = np.asarray(ortho_group.rvs(dim, random_state=rng), dtype=np.float64)
        order = _block_permutation(n, block, rng)
        vectors = base[order] @ rotation + noise * rng.normal(size=(n, dim))
        spaces[tag] = EmbeddingSpace(
            words=tuple(f"{tag}_{i:05d}" for i in range(n)),
            vectors=vectors,
            lang_tag=tag,
        )
        items[tag] = order
        rotations[tag] = rotation
    return SyntheticLanguages(spaces, items, rotations)


def make_language_triple(
    source: str = "a",
    target: str = "b",
    pivot: str = "c",
    **kwargs,
) -> SyntheticLanguages:
    """Source, target and pivot languages for an end-to-end RUBI run."""
    return make_languages((source, target, pivot), **kwargs)


@dataclass(frozen=True)
class HubCloud:
    """Aligned source and target spaces where one target word is a planted hub."""

    source: EmbeddingSpace
    target: EmbeddingSpace
    gold: Lexicon
    hub_row: int


def make_hub_cloud(n: int = 500, dim: int = 20, noise: float = 1.2, seed: int = 0) -> HubCloud:
    """Unit source vectors x_i = g_i + u leaning toward a shared direction u.

    Targets are noisy copies of their sources, except row 0 which is u itself:
    it sits closer to most sources than their own translations do.
    """
    rng = np.random.default_rng(seed)
    u = unit_rows(rng.normal(size=(1, dim)))[0]
    g = rng.normal(size=(n, dim)) / np.sqrt(dim)
    x = unit_rows(g + u)
    y = unit_rows(x + noise * rng.normal(size=(n, dim)) / np.sqrt(dim))
    hub_row = 0
    y[hub_row] = u
    source = EmbeddingSpace(
        tuple(f"s{i}" for i in range(n)), x, lang_tag="src", normalized=Normalization.L2
    )
    target = EmbeddingSpace(
        tuple(f"t{i}" for i in range(n)), y, lang_tag="tgt", normalized=Normalization.L2
    )
    gold = Lexicon({f"s{i}": frozenset({f"t{i}"}) for i in range(n)}, "src", "tgt")
    return HubCloud(source, target, gold, hub_row)
