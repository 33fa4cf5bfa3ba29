"""End-to-end runs: RUBI (learn on a pivot pair, predict on the target pair) and baselines."""

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from ..alignment import (
    AlignmentMap,
    ConvergenceLog,
    load_alignment,
    rcsls_refine,
    save_alignment,
    wasserstein_procrustes,
)
from ..config import PipelineConfig, config_hash
from ..embeddings import EmbeddingSpace, Normalization, load_embeddings, normalize
from ..errors import InputError, RubiError
from ..ltr import (
    RankerModel,
    RelevanceMode,
    TrainConfig,
    TrainingReport,
    assign_relevance,
    build_queries,
    label_threshold,
    load_model,
    save_model,
    score_query,
    train,
)
from ..retrieval import (
    CandidateList,
    Criterion,
    NeighborhoodStats,
    compute_isf_partition,
    extract_features,
    generate_candidates,
    neighborhood_stats_range,
    write_features_csv,
)
from .artifacts import RunDirectory
from .evaluate import InductionResult, evaluate_bli
from .lexicon import Lexicon, load_dictionary, split_dictionary

logger = logging.getLogger(__name__)


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any RubiError escaping the block with ``name``."""
    try:
        yield
    except RubiError as exc:
        raise exc.with_stage(name)


@dataclass(frozen=True)
class LanguageTriple:
    """Source A and target B of the induced lexicon, plus the pivot C used for learning."""

    source: str
    target: str
    pivot: Optional[str] = None

    def as_dict(self) -> dict[str, str]:
        langs = {"source": self.source, "target": self.target}
        if self.pivot is not None:
            langs["pivot"] = self.pivot
        return langs


@dataclass
class PipelineInputs:
    """Embedding spaces and dictionaries, loaded from the config on first use.

    Spaces handed in already normalised are used as they are; raw ones are
    normalised with the configured mode.
    """

    spaces: dict[str, EmbeddingSpace] = field(default_factory=dict)
    lexicons: dict[str, Lexicon] = field(default_factory=dict)

    def space(self, cfg: PipelineConfig, lang: str) -> EmbeddingSpace:
        space = self.spaces.get(lang)
        if space is None:
            with stage("load"):
                space = load_embeddings(cfg.embedding_path(lang), cfg.max_vocab, lang_tag=lang)
        if space.normalized is Normalization.RAW:
            space = normalize(space, cfg.normalization)
        self.spaces[lang] = space
        return space

    def lexicon(self, cfg: PipelineConfig, source: str, target: str) -> Optional[Lexicon]:
        key = f"{source}-{target}"
        if key not in self.lexicons:
            path = cfg.dictionary_path(source, target)
            if path is None:
                return None
            with stage("load"):
                self.lexicons[key] = load_dictionary(path, source, target)
        return self.lexicons[key]


# alignment


def lexicon_pairs(
    lex: Lexicon, Xsrc: EmbeddingSpace, Ytgt: EmbeddingSpace
) -> list[tuple[int, int]]:
    """(source row, target row) for every dictionary pair inside both vocabularies."""
    pairs = []
    for source, target in lex.pairs():
        s, t = Xsrc.lookup(source), Ytgt.lookup(target)
        if s is not None and t is not None:
            pairs.append((s, t))
    return pairs


def align_languages(
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    cfg: PipelineConfig,
    supervision: Optional[Lexicon] = None,
) -> tuple[AlignmentMap, ConvergenceLog]:
    """Wasserstein-Procrustes, then RCSLS on ``supervision`` when refinement is enabled."""
    with stage("align"):
        alignment, log = wasserstein_procrustes(Xsrc, Ytgt, cfg.wproc)
        if cfg.refine and supervision is not None:
            pairs = lexicon_pairs(supervision, Xsrc, Ytgt)
            alignment = rcsls_refine(Xsrc, Ytgt, pairs, alignment, cfg.rcsls)
    return alignment, log


# candidates and features


def source_rows(words: Sequence[str], space: EmbeddingSpace) -> tuple[list[int], int]:
    """Rows of ``words`` in ``space`` and the number of words it lacks."""
    rows = [space.lookup(w) for w in words]
    found = [r for r in rows if r is not None]
    return found, len(rows) - len(found)


def neighborhood_stats_for(
    cfg: PipelineConfig,
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    criterion: Optional[Criterion] = None,
) -> list[NeighborhoodStats]:
    """Stats for K = 1..max(k_max, csls_k when CSLS ranks the candidates)."""
    criterion = Criterion(criterion or cfg.candidate_criterion)
    k_needed = max(cfg.k_max, cfg.csls_k if criterion is Criterion.CSLS else 0)
    if k_needed == 0:
        return []
    return neighborhood_stats_range(Q, Xsrc, Ytgt, k_needed)


def candidate_lists(
    rows: Sequence[int],
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    cfg: PipelineConfig,
    criterion: Criterion | str,
    stats: Sequence[NeighborhoodStats] = (),
) -> list[CandidateList]:
    criterion = Criterion(criterion)
    with stage("candidates"):
        csls_stats = partition = None
        if criterion is Criterion.CSLS:
            if len(stats) < cfg.csls_k:
                stats = neighborhood_stats_range(Q, Xsrc, Ytgt, cfg.csls_k)
            csls_stats = stats[cfg.csls_k - 1]
        elif criterion is Criterion.ISF:
            partition = compute_isf_partition(Q, Xsrc, Ytgt, cfg.isf_beta)
        return generate_candidates(
            rows, Q, Xsrc, Ytgt, cfg.query_size, criterion,
            stats=csls_stats, partition=partition,
        )


def featurize(
    lists: Sequence[CandidateList],
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    cfg: PipelineConfig,
    stats: Sequence[NeighborhoodStats],
) -> list[np.ndarray]:
    with stage("featurize"):
        return [extract_features(cl, Q, Xsrc, Ytgt, cfg.k_max, stats) for cl in lists]


def label_lists(
    lists: Sequence[CandidateList],
    gold: Lexicon,
    cfg: PipelineConfig,
    target: EmbeddingSpace,
) -> tuple[list[CandidateList], list[np.ndarray], int]:
    """Relevance labels per list and the number of lists holding no gold translation.

    continuous_intra needs a gold vector; lists whose gold translations are all
    outside ``target`` are left out of the returned lists.
    """
    kept, labels = [], []
    no_gold = unusable = 0
    for cl in lists:
        answers = gold.translations(cl.source_word)
        graded = cfg.relevance is RelevanceMode.CONTINUOUS_INTRA
        if graded and not any(t in target for t in answers):
            unusable += 1
            continue
        if not answers & set(cl.tokens):
            no_gold += 1
        kept.append(cl)
        labels.append(assign_relevance(cl, gold, cfg.relevance, target))
    if no_gold:
        logger.info(
            "%d of %d queries have no gold translation among their candidates", no_gold, len(kept)
        )
    if unusable:
        logger.warning(
            "%d queries dropped: no gold translation in the %s vocabulary",
            unusable, target.lang_tag,
        )
    return kept, labels, no_gold


# learning and prediction


def ranker_config(cfg: PipelineConfig) -> TrainConfig:
    """Training settings; an unset label threshold follows the relevance mode."""
    if cfg.train.label_threshold is not None:
        return cfg.train
    return cfg.train.model_copy(
        update={"label_threshold": label_threshold(cfg.relevance, cfg.query_size)}
    )



@dataclass
class LearnedRanker:
    model: RankerModel
    report: TrainingReport
    counts: dict[str, int] = field(default_factory=dict)


def learn_ranker(
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ypivot: EmbeddingSpace,
    train_lex: Lexicon,
    cv_lex: Lexicon,
    cfg: PipelineConfig,
    run_dir: Optional[RunDirectory] = None,
) -> LearnedRanker:
    """Learning step: label pivot-side candidate lists and train the ranker on them."""
    stats = neighborhood_stats_for(cfg, Q, Xsrc, Ypivot)

    def queries_for(lex: Lexicon, split: str):
        rows, _ = source_rows(lex.sources, Xsrc)
        lists = candidate_lists(rows, Q, Xsrc, Ypivot, cfg, cfg.candidate_criterion, stats)
        with stage("featurize"):
            lists, labels, no_gold = label_lists(lists, lex, cfg, Ypivot)
        features = featurize(lists, Q, Xsrc, Ypivot, cfg, stats)
        if run_dir is not None and lists:
            write_features_csv(run_dir.features(split), lists, features, labels)
            run_dir.record("featurize", [run_dir.features(split)])
        return build_queries(lists, features, labels), no_gold

    train_queries, no_gold = queries_for(train_lex, "train")
    cv_queries, _ = queries_for(cv_lex, "cv")
    if not train_queries:
        raise InputError(
            "no training queries: the pivot dictionary has no key in the source vocabulary",
            stage="train",
        )

    with stage("train"):
        model, report = train(train_queries, ranker_config(cfg), cv_queries or None)
    counts = {
        "train_queries": len(train_queries),
        "cv_queries": len(cv_queries),
        "no_gold_in_candidates": no_gold,
        "dropped_queries": report.dropped_queries,
    }
    return LearnedRanker(model, report, counts)


def rerank(
    model: RankerModel,
    lists: Sequence[CandidateList],
    features: Sequence[np.ndarray],
) -> list[CandidateList]:
    """Reorder every list by the model's eval-mode scores (ties keep the original order)."""
    queries = build_queries(lists, features)
    ranked = []
    with stage("predict"):
        for cl, query in zip(lists, queries):
            scores = score_query(model, query, mode="eval")
            order = np.argsort(-scores, kind="stable")
            ranked.append(CandidateList(
                source_word=cl.source_word,
                candidates=tuple((cl.tokens[j], float(scores[j])) for j in order),
            ))
    return ranked


def predict_lexicon(
    model: RankerModel,
    Q: AlignmentMap,
    Xsrc: EmbeddingSpace,
    Ytgt: EmbeddingSpace,
    words: Sequence[str],
    cfg: PipelineConfig,
) -> tuple[list[CandidateList], int]:
    """Prediction step: target-side candidates and stats, reranked by ``model``."""
    rows, missing = source_rows(words, Xsrc)
    stats = neighborhood_stats_for(cfg, Q, Xsrc, Ytgt)
    lists = candidate_lists(rows, Q, Xsrc, Ytgt, cfg, cfg.candidate_criterion, stats)
    features = featurize(lists, Q, Xsrc, Ytgt, cfg, stats)
    return rerank(model, lists, features), missing


def evaluation_words(
    cfg: PipelineConfig, Xsrc: EmbeddingSpace, gold: Optional[Lexicon]
) -> list[str]:
    """Gold keys by source frequency (at most eval_dict_size).

    Without a gold dictionary the most frequent source words are used.
    """
    if gold is None:
        n = min(cfg.eval_dict_size or cfg.train_dict_size, len(Xsrc))
        return list(Xsrc.words[:n])
    present = sorted((row, w) for w in gold.sources if (row := Xsrc.lookup(w)) is not None)
    words = [w for _, w in present][:cfg.eval_dict_size]
    # out-of-vocabulary keys are passed on so they get counted
    return words + [w for w in gold.sources if w not in Xsrc]


# runs


def _aligned(
    inputs: PipelineInputs,
    cfg: PipelineConfig,
    source: str,
    target: str,
    run_dir: Optional[RunDirectory],
    supervision: Optional[Lexicon] = None,
) -> AlignmentMap:
    Xsrc, Ytgt = inputs.space(cfg, source), inputs.space(cfg, target)
    if run_dir is not None and run_dir.reusable(run_dir.alignment(source, target)):
        logger.info("reusing alignment %s->%s", source, target)
        return load_alignment(run_dir.alignment(source, target))
    alignment, log = align_languages(Xsrc, Ytgt, cfg, supervision)
    if run_dir is not None:
        save_alignment(alignment, run_dir.alignment(source, target))
        log.to_csv(run_dir.convergence(source, target))
        run_dir.record(
            "align", [run_dir.alignment(source, target), run_dir.convergence(source, target)]
        )
    return alignment


def _finish(
    result: InductionResult,
    langs: LanguageTriple,
    run_dir: Optional[RunDirectory],
) -> InductionResult:
    if run_dir is not None:
        ranked = run_dir.ranked(langs.source, langs.target)
        result.write(run_dir.result, ranked)
        run_dir.record("evaluate", [ranked, run_dir.result])
    if result.evaluation is not None:
        logger.info(
            "%s %s->%s: P@1 %.4f, P@5 %.4f over %d words",
            result.method, langs.source, langs.target,
            result.evaluation.precision_at_1, result.evaluation.precision_at_5,
            result.evaluation.evaluated,
        )
    return result


def run_rubi(
    cfg: PipelineConfig,
    langs: LanguageTriple,
    inputs: Optional[PipelineInputs] = None,
    run_dir: Optional[RunDirectory] = None,
) -> InductionResult:
    """Learn a ranker on source-pivot, then induce the source-target lexicon with it.

    The source-pivot gold dictionary is required; the source-target one is
    optional and only used for evaluation.
    """
    if langs.pivot is None:
        raise InputError("RUBI needs a pivot language")
    inputs = inputs or PipelineInputs()
    pivot_gold = inputs.lexicon(cfg, langs.source, langs.pivot)
    if pivot_gold is None:
        raise InputError(f"no {langs.source}-{langs.pivot} dictionary configured", stage="load")
    target_gold = inputs.lexicon(cfg, langs.source, langs.target)

    Xa = inputs.space(cfg, langs.source)
    Yc = inputs.space(cfg, langs.pivot)
    Yb = inputs.space(cfg, langs.target)
    train_lex, cv_lex = split_dictionary(pivot_gold, Xa, cfg.train_dict_size, cfg.cv_dict_size)

    # learning: source -> pivot
    Q_ac = _aligned(inputs, cfg, langs.source, langs.pivot, run_dir, supervision=train_lex)
    if run_dir is not None and run_dir.reusable(run_dir.model, run_dir.training_counts):
        logger.info("reusing ranker %s", run_dir.model)
        model = load_model(run_dir.model)
        counts: dict[str, int] = json.loads(run_dir.training_counts.read_text(encoding="utf-8"))
    else:
        learned = learn_ranker(Q_ac, Xa, Yc, train_lex, cv_lex, cfg, run_dir)
        model, counts = learned.model, learned.counts
        if run_dir is not None:
            save_model(model, run_dir.model)
            learned.report.to_csv(run_dir.training_report)
            run_dir.training_counts.write_text(json.dumps(counts, sort_keys=True), encoding="utf-8")
            run_dir.record(
                "train", [run_dir.model, run_dir.training_report, run_dir.training_counts]
            )

    # prediction: source -> target
    Q_ab = _aligned(inputs, cfg, langs.source, langs.target, run_dir)
    words = evaluation_words(cfg, Xa, target_gold)
    ranked, missing = predict_lexicon(model, Q_ab, Xa, Yb, words, cfg)
    counts["missing_source_vocab"] = missing

    evaluation = None
    if target_gold is not None:
        with stage("evaluate"):
            evaluation = evaluate_bli(ranked, target_gold, Yb)
    result = InductionResult(
        method="rubi",
        ranked=ranked,
        config_hash=config_hash(cfg),
        seeds=cfg.seeds(),
        evaluation=evaluation,
        counts=counts,
    )
    return _finish(result, langs, run_dir)


def run_baseline(
    cfg: PipelineConfig,
    langs: LanguageTriple,
    criterion: Criterion | str,
    inputs: Optional[PipelineInputs] = None,
    run_dir: Optional[RunDirectory] = None,
) -> InductionResult:
    """Wasserstein-Procrustes alignment followed by a fixed retrieval criterion."""
    criterion = Criterion(criterion)
    inputs = inputs or PipelineInputs()
    gold = inputs.lexicon(cfg, langs.source, langs.target)
    Xa = inputs.space(cfg, langs.source)
    Yb = inputs.space(cfg, langs.target)

    Q = _aligned(inputs, cfg, langs.source, langs.target, run_dir)
    words = evaluation_words(cfg, Xa, gold)
    rows, missing = source_rows(words, Xa)
    ranked = candidate_lists(rows, Q, Xa, Yb, cfg, criterion)

    evaluation = None
    if gold is not None:
        with stage("evaluate"):
            evaluation = evaluate_bli(ranked, gold, Yb)
    result = InductionResult(
        method=f"wproc-{criterion.value}",
        ranked=ranked,
        config_hash=config_hash(cfg),
        seeds=cfg.seeds(),
        evaluation=evaluation,
        counts={"missing_source_vocab": missing},
    )
    return _finish(result, langs, run_dir)
