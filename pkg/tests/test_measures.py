"""Breadth measures: harmonic credit, the five candidates, and path oracles."""

import math

import numpy as np
import pytest

from breadth.corpus import Embedding, PaperRecord, build_author_profile, build_corpus
from breadth.knowledge_space import (
    DistanceMatrix,
    SimilarityMatrix,
    similarity_matrix,
    to_distance,
)
from breadth.measures import (
    BreadthScores,
    CreditWeights,
    avg_shortest_path,
    credit_weights,
    furthest_neighbor_avg,
    harmonic_credit,
    mean_pairwise,
    nearest_neighbor_avg,
    score_author,
    shortest_path_matrix,
    weighted_furthest_neighbor_avg,
)


def sim(rows, ids=None):
    values = np.asarray(rows, dtype=np.float64)
    ids = tuple(ids) if ids else tuple(f"p{i}" for i in range(len(values)))
    return SimilarityMatrix(paper_ids=ids, values=values)


def dist(rows, ids=None):
    values = np.asarray(rows, dtype=np.float64)
    ids = tuple(ids) if ids else tuple(f"p{i}" for i in range(len(values)))
    return DistanceMatrix(paper_ids=ids, values=values)


def random_sim(rng, n, dim=6):
    """Gram matrix of random unit vectors: always a valid similarity matrix."""
    v = rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    s = v @ v.T
    s = (s + s.T) / 2.0
    np.clip(s, -1.0, 1.0, out=s)
    np.fill_diagonal(s, 1.0)
    return SimilarityMatrix(paper_ids=tuple(f"p{i}" for i in range(n)), values=s)


# worked 3x3 instance used across several tests: off-diagonals {0.2, 0.4, 0.6}
WORKED = [[1.0, 0.2, 0.4], [0.2, 1.0, 0.6], [0.4, 0.6, 1.0]]


class TestHarmonicCredit:
    def test_sole_author(self):
        assert harmonic_credit(1, 1) == 1.0

    def test_two_authors(self):
        assert harmonic_credit(1, 2) == pytest.approx(2 / 3, abs=1e-15)
        assert harmonic_credit(2, 2) == pytest.approx(1 / 3, abs=1e-15)

    def test_three_authors(self):
        shares = [harmonic_credit(i, 3) for i in (1, 2, 3)]
        assert shares == pytest.approx([6 / 11, 3 / 11, 2 / 11], abs=1e-15)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_shares_sum_to_one(self, n):
        total = math.fsum(harmonic_credit(i, n) for i in range(1, n + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_strictly_decreasing_in_position(self):
        shares = [harmonic_credit(i, 8) for i in range(1, 9)]
        assert all(a > b for a, b in zip(shares, shares[1:]))

    @pytest.mark.parametrize("position,n", [(0, 3), (4, 3), (-1, 1), (1, 0)])
    def test_out_of_range(self, position, n):
        with pytest.raises(ValueError):
            harmonic_credit(position, n)


class TestCreditWeights:
    def _profile(self):
        papers = [
            PaperRecord(paper_id="p1", year=2000, authors=("a1",)),
            PaperRecord(paper_id="p2", year=2001, authors=("x", "a1")),
            PaperRecord(paper_id="p3", year=2002, authors=("a1", "y", "z")),
        ]
        corpus = build_corpus(papers)
        return build_author_profile(corpus, "a1", min_papers=1)

    def test_full_profile_weights(self):
        w = credit_weights(self._profile())
        assert w.paper_ids == ("p1", "p2", "p3")
        assert w.values == pytest.approx([1.0, 1 / 3, 6 / 11], abs=1e-15)

    def test_subset_follows_requested_order(self):
        w = credit_weights(self._profile(), paper_ids=("p3", "p1"))
        assert w.paper_ids == ("p3", "p1")
        assert w.values == pytest.approx([6 / 11, 1.0], abs=1e-15)

    @pytest.mark.parametrize("bad", [[0.0, 0.5], [1.5, 0.5], [-0.1, 0.5]])
    def test_rejects_out_of_range_weights(self, bad):
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            CreditWeights(paper_ids=("p1", "p2"), values=np.array(bad))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="one weight per paper"):
            CreditWeights(paper_ids=("p1",), values=np.array([0.5, 0.5]))


class TestSimilarityMeasures:
    def test_worked_mean(self):
        assert mean_pairwise(sim(WORKED)) == pytest.approx(0.4, abs=1e-12)

    def test_worked_furthest_neighbor(self):
        # row minima {0.2, 0.2, 0.4}
        assert furthest_neighbor_avg(sim(WORKED)) == pytest.approx(
            0.8 / 3, abs=1e-12
        )

    def test_worked_nearest_neighbor(self):
        # row maxima {0.4, 0.6, 0.6}
        assert nearest_neighbor_avg(sim(WORKED)) == pytest.approx(
            1.6 / 3, abs=1e-12
        )

    def test_worked_weighted_furthest_neighbor(self):
        weights = CreditWeights(
            paper_ids=("p0", "p1", "p2"), values=np.array([1.0, 0.5, 0.25])
        )
        # (1*0.2 + 0.5*0.2 + 0.25*0.4) / 1.75
        assert weighted_furthest_neighbor_avg(sim(WORKED), weights) == pytest.approx(
            0.4 / 1.75, abs=1e-12
        )

    def test_single_pair_all_measures_agree(self):
        s = sim([[1.0, 0.83], [0.83, 1.0]])
        assert mean_pairwise(s) == pytest.approx(0.83)
        assert furthest_neighbor_avg(s) == pytest.approx(0.83)
        assert nearest_neighbor_avg(s) == pytest.approx(0.83)

    def test_constant_offdiagonal(self):
        c = 0.5
        s = sim([[1.0, c, c], [c, 1.0, c], [c, c, 1.0]])
        assert mean_pairwise(s) == pytest.approx(c)
        assert furthest_neighbor_avg(s) == pytest.approx(c)
        assert nearest_neighbor_avg(s) == pytest.approx(c)

    def test_uniform_weights_reduce_to_unweighted(self):
        s = random_sim(np.random.default_rng(3), 9)
        weights = CreditWeights(paper_ids=s.paper_ids, values=np.full(9, 0.5))
        assert weighted_furthest_neighbor_avg(s, weights) == pytest.approx(
            furthest_neighbor_avg(s), abs=1e-12
        )

    def test_weight_alignment_errors(self):
        s = sim(WORKED)
        wrong_ids = CreditWeights(paper_ids=("a", "b", "c"), values=np.full(3, 0.5))
        with pytest.raises(ValueError, match="not aligned"):
            weighted_furthest_neighbor_avg(s, wrong_ids)
        short = CreditWeights(paper_ids=("p0", "p1"), values=np.full(2, 0.5))
        with pytest.raises(ValueError, match="2 weights for a matrix of order 3"):
            weighted_furthest_neighbor_avg(s, short)

    def test_min_mean_max_ordering_on_random_matrices(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(2, 31))
            s = random_sim(rng, n, dim=int(rng.integers(2, 9)))
            fn = furthest_neighbor_avg(s)
            mean = mean_pairwise(s)
            nn = nearest_neighbor_avg(s)
            assert fn <= mean + 1e-12
            assert mean <= nn + 1e-12

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        s = random_sim(rng, 7)
        weights = CreditWeights(
            paper_ids=s.paper_ids, values=rng.uniform(0.1, 1.0, size=7)
        )
        perm = rng.permutation(7)
        shuffled = SimilarityMatrix(
            paper_ids=tuple(s.paper_ids[i] for i in perm),
            values=s.values[np.ix_(perm, perm)],
        )
        shuffled_w = CreditWeights(
            paper_ids=shuffled.paper_ids, values=weights.values[perm]
        )
        assert mean_pairwise(shuffled) == pytest.approx(mean_pairwise(s), abs=1e-12)
        assert furthest_neighbor_avg(shuffled) == pytest.approx(
            furthest_neighbor_avg(s), abs=1e-12
        )
        assert nearest_neighbor_avg(shuffled) == pytest.approx(
            nearest_neighbor_avg(s), abs=1e-12
        )
        assert weighted_furthest_neighbor_avg(shuffled, shuffled_w) == pytest.approx(
            weighted_furthest_neighbor_avg(s, weights), abs=1e-12
        )
        assert avg_shortest_path(to_distance(shuffled)) == pytest.approx(
            avg_shortest_path(to_distance(s)), abs=1e-12
        )


def brute_force_shortest_paths(w):
    """Minimum over every simple path, found by exhaustive DFS (small n only)."""
    n = w.shape[0]
    out = np.zeros((n, n))
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            best = math.inf

            def walk(node, seen, length):
                nonlocal best
                if node == t:
                    best = min(best, length)
                    return
                for nxt in range(n):
                    if nxt not in seen:
                        walk(nxt, seen | {nxt}, length + w[node, nxt])

            walk(s, {s}, 0.0)
            out[s, t] = best
    return out


class TestShortestPaths:
    def test_triangle_shortcut(self):
        # direct A-B edge costs 1.0 but A-C-B costs 0.6
        d = dist(
            [[0.0, 1.0, 0.3], [1.0, 0.0, 0.3], [0.3, 0.3, 0.0]],
            ids=("pa", "pb", "pc"),
        )
        sp = shortest_path_matrix(d)
        assert sp[0, 1] == pytest.approx(0.6, abs=1e-12)
        assert avg_shortest_path(d) == pytest.approx(0.4, abs=1e-12)
        direct_mean = (1.0 + 0.3 + 0.3) / 3
        assert avg_shortest_path(d) < direct_mean

    def test_constant_distances_have_no_shortcut(self):
        c = 0.3
        d = dist([[0.0, c, c], [c, 0.0, c], [c, c, 0.0]])
        assert avg_shortest_path(d) == pytest.approx(c, abs=1e-12)

    def test_two_points(self):
        d = dist([[0.0, 0.5], [0.5, 0.0]])
        assert avg_shortest_path(d) == pytest.approx(0.5)

    def test_rejects_negative_weights(self):
        # DistanceMatrix itself refuses negatives, so smuggle them through a
        # bare stand-in to reach the path computation's own guard
        class Bare:
            values = np.array([[0.0, -0.1], [-0.1, 0.0]])
            order = 2

        with pytest.raises(ValueError, match="negative edge weight"):
            shortest_path_matrix(Bare())

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = int(rng.integers(3, 8))
            d = to_distance(random_sim(rng, n, dim=3))
            sp = shortest_path_matrix(d)
            oracle = brute_force_shortest_paths(d.values)
            assert np.allclose(sp, oracle, atol=1e-12)

    def test_path_matrix_invariants(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            d = to_distance(random_sim(rng, int(rng.integers(3, 12))))
            sp = shortest_path_matrix(d)
            assert np.allclose(sp, sp.T, atol=1e-12)
            assert np.all(np.diag(sp) == 0.0)
            # a shortest path can never exceed the direct edge
            assert np.all(sp <= d.values + 1e-12)
            assert avg_shortest_path(d) <= np.mean(
                d.values[np.triu_indices(d.order, k=1)]
            ) + 1e-12


class TestScoreAuthor:
    def _corpus(self):
        papers = [
            PaperRecord(paper_id="p1", year=2000, authors=("a1",)),
            PaperRecord(paper_id="p2", year=2001, authors=("x", "a1")),
            PaperRecord(paper_id="p3", year=2002, authors=("a1", "y", "z")),
        ]
        embeddings = [
            Embedding("p1", np.array([1.0, 0.0, 0.0])),
            Embedding("p2", np.array([0.6, 0.8, 0.0])),
            Embedding("p3", np.array([0.0, 0.6, 0.8])),
        ]
        return build_corpus(papers, embeddings)

    def test_matches_direct_computation(self):
        corpus = self._corpus()
        profile = build_author_profile(corpus, "a1", min_papers=1)
        scores = score_author(profile, corpus)
        s = similarity_matrix(profile, corpus)
        w = credit_weights(profile, s.paper_ids)
        assert scores.author_id == "a1"
        assert scores.n_papers == 3
        assert scores.mean_pairwise == pytest.approx(mean_pairwise(s))
        assert scores.fn_avg == pytest.approx(furthest_neighbor_avg(s))
        assert scores.wfn_avg == pytest.approx(weighted_furthest_neighbor_avg(s, w))
        assert scores.nn_avg == pytest.approx(nearest_neighbor_avg(s))
        assert scores.aspl == pytest.approx(avg_shortest_path(to_distance(s)))

    def test_identical_papers_are_maximally_narrow(self):
        papers = [
            PaperRecord(paper_id="p1", year=2000, authors=("a1",)),
            PaperRecord(paper_id="p2", year=2001, authors=("a1",)),
        ]
        vec = np.array([0.6, 0.8])
        corpus = build_corpus(papers, [Embedding("p1", vec), Embedding("p2", vec)])
        scores = score_author(build_author_profile(corpus, "a1", min_papers=1), corpus)
        assert scores.mean_pairwise == pytest.approx(1.0)
        assert scores.fn_avg == pytest.approx(1.0)
        assert scores.wfn_avg == pytest.approx(1.0)
        assert scores.nn_avg == pytest.approx(1.0)
        assert scores.aspl == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_papers(self):
        papers = [
            PaperRecord(paper_id="p1", year=2000, authors=("a1",)),
            PaperRecord(paper_id="p2", year=2001, authors=("a1",)),
        ]
        corpus = build_corpus(
            papers,
            [Embedding("p1", np.array([1.0, 0.0])), Embedding("p2", np.array([0.0, 1.0]))],
        )
        scores = score_author(build_author_profile(corpus, "a1", min_papers=1), corpus)
        assert scores.mean_pairwise == pytest.approx(0.0, abs=1e-12)
        assert scores.fn_avg == pytest.approx(0.0, abs=1e-12)
        assert scores.nn_avg == pytest.approx(0.0, abs=1e-12)
        assert scores.aspl == pytest.approx(1.0)

    def test_n_papers_counts_embedded_papers_only(self):
        papers = [
            PaperRecord(paper_id="p1", year=2000, authors=("a1",)),
            PaperRecord(paper_id="p2", year=2001, authors=("a1",)),
            PaperRecord(paper_id="p3", year=2002, authors=("a1",)),
        ]
        embeddings = [
            Embedding("p1", np.array([1.0, 0.0])),
            Embedding("p2", np.array([0.0, 1.0])),
        ]
        corpus = build_corpus(papers, embeddings)
        scores = score_author(build_author_profile(corpus, "a1", min_papers=1), corpus)
        assert scores.n_papers == 2

    def test_csv_row_format(self):
        scores = BreadthScores(
            author_id="a9",
            n_papers=3,
            mean_pairwise=0.4,
            fn_avg=0.8 / 3,
            wfn_avg=0.4 / 1.75,
            nn_avg=1.6 / 3,
            aspl=0.4,
        )
        assert scores.csv_row() == "a9,3,0.400000,0.266667,0.228571,0.533333,0.400000"
        assert scores.value("wfn_avg") == scores.wfn_avg
