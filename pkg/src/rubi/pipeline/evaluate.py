"""BLI evaluation and induction results."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..embeddings import EmbeddingSpace
from ..errors import InputError
from ..ltr import hit_at_k
from ..retrieval import CandidateList, write_candidates_tsv
from .lexicon import Lexicon

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvaluationResult:
    """Precision of ranked lists against a gold lexicon.

    ``evaluated + missing_gold + missing_target_vocab == total``.
    """

    precision_at_1: float
    precision_at_5: float
    evaluated: int
    missing_gold: int
    missing_target_vocab: int
    total: int

    def counts(self) -> dict[str, int]:
        return {
            "evaluated": self.evaluated,
            "missing_gold": self.missing_gold,
            "missing_target_vocab": self.missing_target_vocab,
            "total": self.total,
        }


def evaluate_bli(
    ranked: Sequence[CandidateList],
    gold: Lexicon,
    target: Optional[EmbeddingSpace] = None,
) -> EvaluationResult:
    """precision@1 and @5, counting a hit when any gold translation is ranked high enough.

    A word is left out of the denominator when it has no gold entry, or when
    none of its gold translations exists in ``target``'s vocabulary.
    """
    hits1 = hits5 = evaluated = missing_gold = missing_vocab = 0
    for cl in ranked:
        answers = gold.translations(cl.source_word)
        if not answers:
            missing_gold += 1
            continue
        if target is not None and not any(t in target for t in answers):
            missing_vocab += 1
            continue
        evaluated += 1
        hits1 += hit_at_k(cl.tokens, answers, 1)
        hits5 += hit_at_k(cl.tokens, answers, 5)
    if evaluated == 0:
        raise InputError(
            f"no evaluable words: {missing_gold} without gold entry, "
            f"{missing_vocab} with gold translations outside the target vocabulary"
        )
    if missing_gold or missing_vocab:
        logger.info(
            "evaluation skipped %d word(s) without gold and %d outside the target vocabulary",
            missing_gold, missing_vocab,
        )
    return EvaluationResult(
        precision_at_1=hits1 / evaluated,
        precision_at_5=hits5 / evaluated,
        evaluated=evaluated,
        missing_gold=missing_gold,
        missing_target_vocab=missing_vocab,
        total=len(ranked),
    )


@dataclass
class InductionResult:
    """Ranked translations of a run plus their evaluation and provenance."""

    method: str
    ranked: list[CandidateList]
    config_hash: str
    seeds: dict[str, int]
    evaluation: Optional[EvaluationResult] = None
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def precision_at_1(self) -> Optional[float]:
        return self.evaluation.precision_at_1 if self.evaluation else None

    @property
    def precision_at_5(self) -> Optional[float]:
        return self.evaluation.precision_at_5 if self.evaluation else None

    def to_dict(self) -> dict:
        counts = dict(self.counts)
        counts["ranked"] = len(self.ranked)
        if self.evaluation is not None:
            counts.update(self.evaluation.counts())
        return {
            "method": self.method,
            "precision_at_1": self.precision_at_1,
            "precision_at_5": self.precision_at_5,
            "counts": counts,
            "config_hash": self.config_hash,
            "seeds": self.seeds,
        }

    def to_json(self) -> str:
        """Deterministic JSON: sorted keys, no timestamps."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, json_path: Path | str, ranked_path: Optional[Path | str] = None) -> None:
        Path(json_path).write_text(self.to_json(), encoding="utf-8")
        if ranked_path is not None:
            write_candidates_tsv(self.ranked, ranked_path)
