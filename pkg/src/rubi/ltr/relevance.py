"""Relevance labels for candidate lists."""

from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np

from ..embeddings import EmbeddingSpace
from ..errors import InputError
from ..retrieval import CandidateList, unit_rows

if TYPE_CHECKING:
    from ..pipeline.lexicon import Lexicon


class RelevanceMode(str, Enum):
    BINARY = "binary"
    SEMI_BINARY = "semi_binary"
    CONTINUOUS_INTRA = "continuous_intra"


def assign_relevance(
    cand: CandidateList,
    gold: "Lexicon",
    mode: RelevanceMode | str,
    target: Optional[EmbeddingSpace] = None,
) -> np.ndarray:
    """Integer grade per candidate.

    binary gives 1 to gold translations and 0 otherwise, semi_binary 2 and 1.
    continuous_intra grades candidates q-1..0 by their best cosine to a gold
    translation vector in ``target``; gold candidates always get q-1.
    """
    mode = RelevanceMode(mode)
    answers = gold.translations(cand.source_word)
    if not answers:
        raise InputError(f"{cand.source_word!r} has no gold translation")
    is_gold = np.array([t in answers for t in cand.tokens], dtype=bool)

    if mode is RelevanceMode.BINARY:
        return is_gold.astype(np.int64)
    if mode is RelevanceMode.SEMI_BINARY:
        return is_gold.astype(np.int64) + 1

    if target is None:
        raise InputError("continuous_intra relevance needs the target embedding space")
    gold_rows = [target.lookup(t) for t in sorted(answers)]
    gold_rows = [r for r in gold_rows if r is not None]
    if not gold_rows:
        raise InputError(
            f"no gold translation of {cand.source_word!r} is in the "
            f"{target.lang_tag or 'target'} vocabulary"
        )
    cand_rows = []
    for token in cand.tokens:
        row = target.lookup(token)
        if row is None:
            raise InputError(f"candidate {token!r} is not in the target vocabulary")
        cand_rows.append(row)

    sims = unit_rows(target.vectors[cand_rows]) @ unit_rows(target.vectors[gold_rows]).T
    closeness = sims.max(axis=1)
    q = len(cand)
    order = np.argsort(-closeness, kind="stable")
    grades = np.empty(q, dtype=np.int64)
    grades[order] = np.arange(q - 1, -1, -1)
    grades[is_gold] = q - 1
    return grades


def label_threshold(mode: RelevanceMode | str, q: int) -> float:
    """Grade above which a label counts as positive for pointwise losses."""
    mode = RelevanceMode(mode)
    if mode is RelevanceMode.BINARY:
        return 0.5
    if mode is RelevanceMode.SEMI_BINARY:
        return 1.5
    return (q - 1) / 2.0
