"""Tests for relevance labels and ranking datasets."""

import numpy as np
import pytest

from rubi.errors import InputError
from rubi.ltr import (
    RankingQuery,
    RelevanceMode,
    assign_relevance,
    build_queries,
    label_threshold,
    read_features_csv,
)
from rubi.pipeline import Lexicon
from rubi.retrieval import CandidateList, write_features_csv


@pytest.fixture
def gold():
    return Lexicon({"s0": frozenset({"t0"}), "s1": frozenset({"t1", "t3"})}, "src", "tgt")


def candidates(source: str, *tokens: str) -> CandidateList:
    return CandidateList(source, tuple((t, 1.0 - 0.1 * i) for i, t in enumerate(tokens)))


class TestAssignRelevance:
    """Tests for the three labelling schemes."""

    def test_binary(self, gold):
        """Test gold translations get 1 and everything else 0."""
        labels = assign_relevance(candidates("s1", "t0", "t1", "t2", "t3"), gold, "binary")
        assert labels.tolist() == [0, 1, 0, 1]

    def test_semi_binary(self, gold):
        """Test gold gets 2 and other candidates 1."""
        labels = assign_relevance(candidates("s0", "t2", "t0"), gold, RelevanceMode.SEMI_BINARY)
        assert labels.tolist() == [1, 2]

    def test_continuous_intra(self, gold, make_space):
        """Test candidates are graded by closeness to the gold vector."""
        target = make_space(
            np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.2], [1.0, 1.0]]), "t", "tgt"
        )
        cand = candidates("s0", "t1", "t3", "t2", "t0")

        labels = assign_relevance(cand, gold, "continuous_intra", target)

        assert labels.tolist() == [0, 1, 2, 3]

    def test_continuous_intra_needs_target(self, gold):
        """Test the graded mode refuses to run without vectors."""
        with pytest.raises(InputError):
            assign_relevance(candidates("s0", "t0"), gold, "continuous_intra")

    def test_continuous_intra_gold_outside_vocabulary(self, make_space):
        """Test a word whose gold translations have no vectors is refused."""
        target = make_space(np.eye(2), "t", "tgt")
        lex = Lexicon({"s0": frozenset({"zz"})})
        with pytest.raises(InputError):
            assign_relevance(candidates("s0", "t0", "t1"), lex, "continuous_intra", target)

    def test_word_without_gold(self, gold):
        """Test labelling needs a gold entry."""
        with pytest.raises(InputError):
            assign_relevance(candidates("s9", "t0"), gold, "binary")

    def test_thresholds(self):
        """Test the positive-label cut for each mode."""
        assert label_threshold("binary", 10) == 0.5
        assert label_threshold("semi_binary", 10) == 1.5
        assert label_threshold("continuous_intra", 10) == 4.5


class TestRankingQuery:
    """Tests for query validation."""

    def test_rejects_negative_labels(self):
        """Test labels must be non-negative."""
        with pytest.raises(InputError):
            RankingQuery("q", np.ones((2, 1)), np.array([1, -1]))

    def test_rejects_non_finite_features(self):
        """Test NaN features are refused."""
        with pytest.raises(InputError):
            RankingQuery("q", np.array([[np.nan], [0.0]]), np.zeros(2))

    def test_rejects_label_count_mismatch(self):
        """Test one label per item."""
        with pytest.raises(InputError):
            RankingQuery("q", np.ones((3, 1)), np.zeros(2))

    def test_valid_items(self):
        """Test the mask selects features and labels."""
        query = RankingQuery("q", np.arange(6.0).reshape(3, 2), [2, 0, 1], mask=[True, False, True])

        assert query.valid_labels.tolist() == [2, 1]
        assert query.valid_features.tolist() == [[0.0, 1.0], [4.0, 5.0]]
        assert query.feature_dim == 2


class TestDataset:
    """Tests for building queries and the feature CSV."""

    def test_build_unlabelled(self):
        """Test missing labels become zeros."""
        cl = candidates("s0", "a", "b")
        (query,) = build_queries([cl], [np.ones((2, 3))])

        assert query.query_id == "s0"
        assert query.candidates == ("a", "b")
        assert query.labels.tolist() == [0, 0]

    def test_build_length_mismatch(self):
        """Test lists and features must pair up."""
        with pytest.raises(InputError):
            build_queries([candidates("s0", "a")], [])

    def test_csv_round_trip(self, tmp_path):
        """Test the feature CSV groups rows back into queries in file order."""
        lists = [candidates("s1", "a", "b"), candidates("s0", "c", "d", "e")]
        features = [
            np.array([[0.5, 0.1], [0.25, -0.3]]),
            np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]),
        ]
        labels = [np.array([2, 1]), np.array([1, 1, 2])]
        path = tmp_path / "features.csv"
        write_features_csv(path, lists, features, labels)

        queries = read_features_csv(path)

        assert [q.query_id for q in queries] == ["s1", "s0"]
        assert queries[1].candidates == ("c", "d", "e")
        np.testing.assert_array_equal(queries[0].features, features[0])
        assert queries[1].labels.tolist() == [1, 1, 2]

    def test_csv_without_labels(self, tmp_path):
        """Test empty label cells read as 0."""
        path = tmp_path / "features.csv"
        write_features_csv(path, [candidates("s0", "a")], [np.array([[0.5, 0.5]])])

        (query,) = read_features_csv(path)

        assert query.labels.tolist() == [0]

    def test_csv_bad_header(self, write_text):
        """Test a file without the expected header is refused."""
        with pytest.raises(InputError):
            read_features_csv(write_text("bad.csv", "a,b,c\n1,2,3\n"))

    def test_csv_ragged_row(self, write_text):
        """Test rows must match the header width."""
        path = write_text("ragged.csv", "query,candidate,label,cosine\ns0,a,1,0.5\ns0,b,1\n")
        with pytest.raises(InputError):
            read_features_csv(path)

    def test_csv_invalid_utf8(self, tmp_path):
        """Test undecodable bytes are an input error."""
        path = tmp_path / "features.csv"
        path.write_bytes(b"query,candidate,label,cosine\n\xff,a,1,0.5\n")

        with pytest.raises(InputError):
            read_features_csv(path)
