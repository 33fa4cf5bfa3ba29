"""Tests for NN, CSLS and ISF retrieval, candidates and features."""

import math

import numpy as np
import pytest

from rubi.alignment import AlignmentMap
from rubi.errors import InputError
from rubi.pipeline import make_hub_cloud
from rubi.retrieval import (
    CandidateList,
    Criterion,
    compute_isf_partition,
    compute_neighborhood_stats,
    cosine_sim,
    csls_score,
    extract_features,
    feature_names,
    generate_candidates,
    hub_in_degree,
    isf_score,
    neighborhood_stats_range,
    read_candidates_tsv,
    write_candidates_tsv,
    write_features_csv,
)


def identity(space) -> AlignmentMap:
    return AlignmentMap.identity(space.dim)


class TestCosine:
    """Tests for cosine similarity."""

    def test_parallel_orthogonal_and_diagonal(self):
        """Test the three textbook angles."""
        assert cosine_sim(np.array([2.0, 0.0]), np.array([5.0, 0.0])) == pytest.approx(1.0)
        assert cosine_sim(np.array([1.0, 0.0]), np.array([0.0, 3.0])) == pytest.approx(0.0)
        diagonal = cosine_sim(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert diagonal == pytest.approx(math.sqrt(2) / 2)

    def test_zero_vector(self):
        """Test the zero vector is refused."""
        with pytest.raises(InputError):
            cosine_sim(np.zeros(2), np.ones(2))

    def test_cosine_ranking_equals_distance_ranking(self, make_space, rng):
        """Test ranking by cosine equals ranking by negative distance for unit vectors."""
        X = make_space(rng.normal(size=(30, 6)))
        query = X.vectors[0]

        by_cos = np.argsort(-(X.vectors @ query), kind="stable")
        by_dist = np.argsort(np.linalg.norm(X.vectors - query, axis=1), kind="stable")

        assert by_cos.tolist() == by_dist.tolist()


class TestNeighborhoodStats:
    """Tests for CSLS neighbourhood statistics."""

    def test_k1_same_space_is_best_other_similarity(self, make_space, rng):
        """Test K=1 on a shared space gives each word's best similarity to another word."""
        X = make_space(rng.normal(size=(5, 3)))
        sims = X.vectors @ X.vectors.T
        np.fill_diagonal(sims, -np.inf)
        best_other = sims.max(axis=1)

        stats = compute_neighborhood_stats(identity(X), X, X, 1)

        np.testing.assert_allclose(stats.r_source, best_other, atol=1e-12)
        np.testing.assert_allclose(stats.r_target, best_other, atol=1e-12)

    def test_csls_on_five_points(self, make_space, rng):
        """Test CSLS(x, x) = 2 - r_T - r_S against an exhaustive computation."""
        X = make_space(rng.normal(size=(5, 3)))
        stats = compute_neighborhood_stats(identity(X), X, X, 1)
        sims = X.vectors @ X.vectors.T
        for i in range(5):
            others = np.delete(sims[i], i)
            expected = 2.0 - 2.0 * others.max()
            assert csls_score(X.vectors[i], X.vectors[i], stats, i, i) == pytest.approx(expected)

    def test_identity_holds_on_random_fixtures(self, make_space):
        """Test csls + r_T + r_S - 2 cos = 0 on 200 random fixtures."""
        rng = np.random.default_rng(11)
        for _ in range(200):
            X = make_space(rng.normal(size=(8, 4)), "s")
            Y = make_space(rng.normal(size=(8, 4)), "t")
            stats = compute_neighborhood_stats(identity(X), X, Y, 3)
            s, t = rng.integers(0, 8, size=2)
            value = csls_score(X.vectors[s], Y.vectors[t], stats, s, t)
            cos = cosine_sim(X.vectors[s], Y.vectors[t])
            residual = value + stats.r_source[s] + stats.r_target[t] - 2.0 * cos
            assert abs(residual) <= 1e-12

    def test_constant_similarity_gives_zero(self, make_space):
        """Test CSLS is 0 between distinct words when all similarities are equal."""
        X = make_space(np.eye(5) + 0.5)
        stats = compute_neighborhood_stats(identity(X), X, X, 2)

        for i in range(5):
            for j in range(5):
                if i != j:
                    value = csls_score(X.vectors[i], X.vectors[j], stats, i, j)
                    assert value == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(stats.r_source, stats.r_source[0])

    def test_full_vocabulary_gives_global_means(self, make_space, rng):
        """Test K = vocabulary size averages over every word."""
        X = make_space(rng.normal(size=(6, 3)), "s")
        Y = make_space(rng.normal(size=(6, 3)), "t")
        sims = X.vectors @ Y.vectors.T

        stats = compute_neighborhood_stats(identity(X), X, Y, 6)

        np.testing.assert_allclose(stats.r_source, sims.mean(axis=1), atol=1e-12)
        np.testing.assert_allclose(stats.r_target, sims.mean(axis=0), atol=1e-12)

    def test_n_minus_one_same_space_excludes_self(self, make_space, rng):
        """Test K = n - 1 on a shared space is the row mean without the diagonal."""
        X = make_space(rng.normal(size=(7, 3)))
        sims = X.vectors @ X.vectors.T
        expected = (sims.sum(axis=1) - np.diag(sims)) / 6

        stats = compute_neighborhood_stats(identity(X), X, X, 6)

        np.testing.assert_allclose(stats.r_source, expected, atol=1e-12)

    def test_k_out_of_range(self, random_space):
        """Test K = 0 and K beyond the pool are refused."""
        with pytest.raises(InputError):
            compute_neighborhood_stats(identity(random_space), random_space, random_space, 0)
        with pytest.raises(InputError):
            compute_neighborhood_stats(identity(random_space), random_space, random_space, 40)

    def test_independent_of_tiling(self, make_space, rng):
        """Test stats do not depend on the tile size."""
        X = make_space(rng.normal(size=(25, 4)), "s")
        Y = make_space(rng.normal(size=(25, 4)), "t")

        small = neighborhood_stats_range(identity(X), X, Y, 4, tile=3)
        large = neighborhood_stats_range(identity(X), X, Y, 4)

        for a, b in zip(small, large):
            np.testing.assert_allclose(a.r_source, b.r_source, atol=1e-12)
            np.testing.assert_allclose(a.r_target, b.r_target, atol=1e-12)

    def test_range_matches_single_k(self, make_space, rng):
        """Test the K-range pass agrees with separate computations."""
        X = make_space(rng.normal(size=(12, 4)), "s")
        Y = make_space(rng.normal(size=(12, 4)), "t")

        stats = neighborhood_stats_range(identity(X), X, Y, 3)

        for k in (1, 2, 3):
            single = compute_neighborhood_stats(identity(X), X, Y, k)
            np.testing.assert_allclose(stats[k - 1].r_source, single.r_source, atol=1e-12)
            assert stats[k - 1].k == k


class TestIsf:
    """Tests for the inverted softmax."""

    def test_single_source_scores_one(self, make_space, rng):
        """Test a lone source takes all the probability mass."""
        X = make_space(rng.normal(size=(1, 3)), "s")
        Y = make_space(rng.normal(size=(2, 3)), "t")
        partition = compute_isf_partition(identity(X), X, Y, beta=30.0)

        assert isf_score(X.vectors[0], Y.vectors[1], 30.0, partition, 1) == pytest.approx(1.0)

    def test_two_equal_similarities_split(self, make_space):
        """Test two sources equally close to a target get 0.5 each."""
        X = make_space(np.array([[1.0, 1.0], [1.0, -1.0]]), "s")
        Y = make_space(np.array([[1.0, 0.0]]), "t")
        partition = compute_isf_partition(identity(X), X, Y, beta=5.0)

        assert isf_score(X.vectors[0], Y.vectors[0], 5.0, partition, 0) == pytest.approx(0.5)
        assert isf_score(X.vectors[1], Y.vectors[0], 5.0, partition, 0) == pytest.approx(0.5)

    def test_three_word_arithmetic(self, make_space, rng):
        """Test against a hand-rolled softmax over the target's column."""
        X = make_space(rng.normal(size=(3, 3)), "s")
        Y = make_space(rng.normal(size=(3, 3)), "t")
        beta = 2.0
        partition = compute_isf_partition(identity(X), X, Y, beta=beta)

        column = np.exp(beta * (X.vectors @ Y.vectors[2]))
        expected = column / column.sum()

        for s in range(3):
            value = isf_score(X.vectors[s], Y.vectors[2], beta, partition, 2)
            assert value == pytest.approx(expected[s])

    def test_beta_must_be_positive(self, random_space):
        """Test a non-positive temperature is refused."""
        with pytest.raises(InputError):
            compute_isf_partition(identity(random_space), random_space, random_space, beta=0.0)


class TestCandidates:
    """Tests for candidate generation."""

    @pytest.fixture
    def aligned(self, make_space, rng):
        X = make_space(rng.normal(size=(30, 6)), "s", "src")
        perm = rng.permutation(30)
        Y = make_space(X.vectors[perm], "t", "tgt")
        gold = np.empty(30, dtype=np.int64)
        gold[perm] = np.arange(30)
        return X, Y, gold

    def test_q1_finds_translation(self, aligned):
        """Test the top candidate is the planted translation."""
        X, Y, gold = aligned

        lists = generate_candidates(range(30), identity(X), X, Y, q=1)

        assert [cl.tokens[0] for cl in lists] == [Y.words[g] for g in gold]

    def test_full_vocabulary_ranked(self, aligned):
        """Test q = vocabulary size returns every target word, sorted."""
        X, Y, _ = aligned

        (cl,) = generate_candidates([0], identity(X), X, Y, q=30)

        assert sorted(cl.tokens) == sorted(Y.words)
        scores = [s for _, s in cl.candidates]
        assert scores == sorted(scores, reverse=True)

    def test_deterministic_and_csls(self, aligned):
        """Test repeated calls agree and CSLS finds the translation too."""
        X, Y, gold = aligned
        stats = compute_neighborhood_stats(identity(X), X, Y, 1)

        first = generate_candidates(range(30), identity(X), X, Y, 3, Criterion.CSLS, stats=stats)
        second = generate_candidates(range(30), identity(X), X, Y, 3, "csls", stats=stats)

        assert first == second
        assert [cl.tokens[0] for cl in first] == [Y.words[g] for g in gold]

    def test_ties_prefer_lower_index(self, make_space):
        """Test equal scores keep target order."""
        X = make_space(np.array([[1.0, 0.0]]), "s")
        Y = make_space(np.array([[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]]), "t")

        (cl,) = generate_candidates([0], identity(X), X, Y, q=3)

        assert cl.tokens == ["t1", "t0", "t2"]

    def test_q_larger_than_vocabulary(self, aligned):
        """Test q beyond the target vocabulary is refused."""
        X, Y, _ = aligned
        with pytest.raises(InputError):
            generate_candidates([0], identity(X), X, Y, q=31)

    def test_csls_needs_stats(self, aligned):
        """Test CSLS without stats is refused."""
        X, Y, _ = aligned
        with pytest.raises(InputError):
            generate_candidates([0], identity(X), X, Y, 2, Criterion.CSLS)

    def test_candidate_list_invariants(self):
        """Test duplicates and unsorted scores are refused."""
        with pytest.raises(InputError):
            CandidateList("a", (("x", 0.9), ("x", 0.1)))
        with pytest.raises(InputError):
            CandidateList("a", (("x", 0.1), ("y", 0.9)))

    def test_tsv_round_trip(self, aligned, tmp_path):
        """Test candidate lists survive the TSV format."""
        X, Y, _ = aligned
        lists = generate_candidates(range(4), identity(X), X, Y, q=3)
        path = tmp_path / "cands.tsv"

        write_candidates_tsv(lists, path)

        assert read_candidates_tsv(path) == lists
        assert path.read_text().splitlines()[0].count("\t") == 6

    def test_tsv_directory_is_input_error(self, tmp_path):
        """Test reading a directory as a candidate file is an input error."""
        with pytest.raises(InputError):
            read_candidates_tsv(tmp_path)


class TestHubness:
    """Tests for hub reduction by CSLS."""

    def test_csls_lowers_hub_in_degree(self):
        """Test CSLS top-1 hub in-degree <= NN top-1 hub in-degree on a planted hub."""
        cloud = make_hub_cloud(n=500, dim=20, seed=0)
        X, Y = cloud.source, cloud.target
        Q = identity(X)
        stats = compute_neighborhood_stats(Q, X, Y, 10)

        nn = generate_candidates(range(500), Q, X, Y, 1)
        csls = generate_candidates(range(500), Q, X, Y, 1, "csls", stats=stats)
        nn_top = np.array([Y.lookup(cl.tokens[0]) for cl in nn])
        csls_top = np.array([Y.lookup(cl.tokens[0]) for cl in csls])

        assert hub_in_degree(csls_top) <= hub_in_degree(nn_top)
        assert np.sum(nn_top == cloud.hub_row) > np.sum(csls_top == cloud.hub_row)

    def test_in_degree_counts(self):
        """Test the largest shared top-1 count."""
        assert hub_in_degree(np.array([2, 2, 1, 2])) == 3
        assert hub_in_degree(np.array([], dtype=np.int64)) == 0


class TestFeatures:
    """Tests for the ranker feature extractor."""

    @pytest.fixture
    def five(self, make_space, rng):
        X = make_space(rng.normal(size=(5, 3)), "s")
        Y = make_space(rng.normal(size=(5, 3)), "t")
        return X, Y

    def test_cosine_only_when_k_max_zero(self, five):
        """Test k_max = 0 keeps only the cosine column."""
        X, Y = five
        (cl,) = generate_candidates([0], identity(X), X, Y, q=3)

        features = extract_features(cl, identity(X), X, Y, 0, [])

        assert features.shape == (3, 1)
        assert feature_names(0) == ["cosine"]

    def test_query_word_on_identical_space(self, random_space):
        """Test a word's own cosine feature is 1 on a shared space."""
        Q = identity(random_space)
        cl = CandidateList(random_space.words[0], ((random_space.words[0], 1.0),))
        stats = neighborhood_stats_range(Q, random_space, random_space, 2)

        features = extract_features(cl, Q, random_space, random_space, 2, stats)

        assert features[0, 0] == pytest.approx(1.0)

    def test_matches_exhaustive_oracle(self, five):
        """Test k_max = 2 against sorting every neighbourhood by hand."""
        X, Y = five
        Q = identity(X)
        stats = neighborhood_stats_range(Q, X, Y, 2)
        (cl,) = generate_candidates([1], Q, X, Y, q=4)

        features = extract_features(cl, Q, X, Y, 2, stats)

        sims = X.vectors @ Y.vectors.T
        for row, token in enumerate(cl.tokens):
            t = Y.lookup(token)
            assert features[row, 0] == pytest.approx(sims[1, t])
            for k in (1, 2):
                r_src = np.sort(sims[1])[::-1][:k].mean()
                r_tgt = np.sort(sims[:, t])[::-1][:k].mean()
                assert features[row, k] == pytest.approx(2 * sims[1, t] - r_src - r_tgt)

    def test_invariant_to_candidate_order(self, five):
        """Test reversing the candidates reverses the feature rows and nothing else."""
        X, Y = five
        Q = identity(X)
        stats = neighborhood_stats_range(Q, X, Y, 2)
        (cl,) = generate_candidates([2], Q, X, Y, q=4)
        flipped = CandidateList(cl.source_word, tuple((t, 0.0) for t in reversed(cl.tokens)))

        a = extract_features(cl, Q, X, Y, 2, stats)
        b = extract_features(flipped, Q, X, Y, 2, stats)

        np.testing.assert_allclose(a, b[::-1])

    def test_missing_stats(self, five):
        """Test fewer stats than k_max is refused."""
        X, Y = five
        (cl,) = generate_candidates([0], identity(X), X, Y, q=2)
        with pytest.raises(InputError):
            extract_features(cl, identity(X), X, Y, 2, [])

    def test_features_csv_header(self, five, tmp_path):
        """Test the CSV names every feature column."""
        X, Y = five
        Q = identity(X)
        stats = neighborhood_stats_range(Q, X, Y, 2)
        lists = generate_candidates([0, 1], Q, X, Y, q=2)
        features = [extract_features(cl, Q, X, Y, 2, stats) for cl in lists]
        path = tmp_path / "features.csv"

        write_features_csv(path, lists, features, [np.array([2, 1]), np.array([1, 1])])

        lines = path.read_text().splitlines()
        assert lines[0] == "query,candidate,label,cosine,csls_1,csls_2"
        assert len(lines) == 5
        assert lines[1].startswith("s0,")
