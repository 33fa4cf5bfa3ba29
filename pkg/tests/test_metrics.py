"""Tests for ranking metrics."""

import math

import pytest

from rubi.ltr import dcg_at_k, hit_at_k, ndcg_at_k, precision_at_k, ranking_from_scores


class TestDcg:
    """Tests for DCG and NDCG."""

    def test_single_relevant_at_top(self):
        """Test one label-1 item at rank 1 is worth exactly 1."""
        assert dcg_at_k([1, 0], [0, 1], 1) == pytest.approx(1.0)

    def test_graded_labels(self):
        """Test (2^3 - 1) + (2^2 - 1) / log2(3)."""
        assert dcg_at_k([3, 2, 0], [0, 1, 2], 3) == pytest.approx(7 + 3 / math.log2(3))
        assert dcg_at_k([3, 2, 0], [0, 1, 2], 3) == pytest.approx(8.8928, abs=1e-4)

    def test_cutoff_truncates(self):
        """Test k = 1 only counts the first rank."""
        assert dcg_at_k([3, 2, 0], [0, 1, 2], 1) == pytest.approx(7.0)

    def test_k_must_be_positive(self):
        """Test k = 0 is refused."""
        with pytest.raises(ValueError):
            dcg_at_k([1], [0], 0)

    def test_ndcg_reversed_pair(self):
        """Test the relevant item at rank 2 scores 1 / log2(3)."""
        assert ndcg_at_k([1, 0], [1, 0], 2) == pytest.approx(1 / math.log2(3))
        assert ndcg_at_k([1, 0], [1, 0], 2) == pytest.approx(0.6309, abs=1e-4)

    def test_ndcg_ideal_is_one(self):
        """Test the label-sorted ranking is ideal."""
        assert ndcg_at_k([0, 2, 1], [1, 2, 0], 3) == pytest.approx(1.0)

    def test_ndcg_all_zero_labels(self):
        """Test a query without relevant items scores 0."""
        assert ndcg_at_k([0, 0, 0], [2, 1, 0], 3) == 0.0


class TestRanking:
    """Tests for turning scores into a ranking."""

    def test_best_first_with_stable_ties(self):
        """Test ties keep the lower index first."""
        assert ranking_from_scores([0.5, 0.9, 0.5, -1.0]).tolist() == [1, 0, 2, 3]


class TestPrecision:
    """Tests for hit@k and precision@k."""

    def test_hit(self):
        """Test hits only count within the first k tokens."""
        assert hit_at_k(["a", "b", "c"], {"b"}, 2)
        assert not hit_at_k(["a", "b", "c"], {"c"}, 2)
        assert not hit_at_k([], {"c"}, 5)

    def test_precision(self):
        """Test the fraction of queries with a hit."""
        ranked = [["a", "b"], ["c", "d"], ["e", "f"], ["g", "h"]]
        gold = [{"a"}, {"d"}, {"x"}, {"g", "y"}]

        assert precision_at_k(ranked, gold, 1) == pytest.approx(0.5)
        assert precision_at_k(ranked, gold, 2) == pytest.approx(0.75)

    def test_precision_errors(self):
        """Test mismatched or empty inputs are refused."""
        with pytest.raises(ValueError):
            precision_at_k([["a"]], [], 1)
        with pytest.raises(ValueError):
            precision_at_k([], [], 1)
