"""RUBI orchestration: dictionaries, evaluation, run directories and end-to-end runs."""

from .artifacts import RunDirectory
from .evaluate import EvaluationResult, InductionResult, evaluate_bli
from .lexicon import DictionaryReport, Lexicon, load_dictionary, split_dictionary, write_dictionary
from .runner import (
    LanguageTriple,
    LearnedRanker,
    PipelineInputs,
    align_languages,
    candidate_lists,
    evaluation_words,
    featurize,
    label_lists,
    learn_ranker,
    lexicon_pairs,
    neighborhood_stats_for,
    predict_lexicon,
    ranker_config,
    rerank,
    run_baseline,
    run_rubi,
    source_rows,
    stage,
)
from .synthetic import (
    HubCloud,
    SyntheticLanguages,
    make_hub_cloud,
    make_language_triple,
    make_languages,
)

__all__ = [
    "DictionaryReport",
    "EvaluationResult",
    "HubCloud",
    "InductionResult",
    "LanguageTriple",
    "LearnedRanker",
    "Lexicon",
    "PipelineInputs",
    "RunDirectory",
    "SyntheticLanguages",
    "align_languages",
    "candidate_lists",
    "evaluate_bli",
    "evaluation_words",
    "featurize",
    "label_lists",
    "learn_ranker",
    "lexicon_pairs",
    "load_dictionary",
    "make_hub_cloud",
    "make_language_triple",
    "make_languages",
    "neighborhood_stats_for",
    "predict_lexicon",
    "ranker_config",
    "rerank",
    "run_baseline",
    "run_rubi",
    "source_rows",
    "split_dictionary",
    "stage",
    "write_dictionary",
]
