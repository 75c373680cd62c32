"""Candidate epistemic-breadth measures over an author's similarity matrix.

Five measures are computed per author:

* ``mean_pairwise``: arithmetic mean of all pairwise cosines (baseline).
* ``fn_avg``: mean over papers of the furthest-neighbor similarity, i.e.
  each paper's minimum similarity to any other paper.
* ``wfn_avg``: the same per-paper scores averaged with harmonic authorship
  credit weights instead of uniformly.
* ``nn_avg``: mean over papers of the nearest-neighbor (maximum) similarity,
  kept as a deliberate contrast.
* ``aspl``: average shortest-path length of the complete similarity graph
  with (1 - similarity) edge weights; an indirect path can undercut the
  direct edge.

Higher similarity-based values mean a narrower profile; higher aspl means a
broader one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import AuthorProfile, Corpus
from .knowledge_space import (
    DistanceMatrix,
    SimilarityMatrix,
    similarity_matrix,
    to_distance,
)

SCORE_COLUMNS = (
    "author_id",
    "n_papers",
    "mean_pairwise",
    "fn_avg",
    "wfn_avg",
    "nn_avg",
    "aspl",
)


@dataclass(frozen=True)
class BreadthScores:
    """All five candidate measure values for one author."""

    author_id: str
    n_papers: int
    mean_pairwise: float
    fn_avg: float
    wfn_avg: float
    nn_avg: float
    aspl: float

    def value(self, measure: str) -> float:
        return getattr(self, measure)

    def csv_row(self) -> str:
        return ",".join(
            [
                self.author_id,
                str(self.n_papers),
                f"{self.mean_pairwise:.6f}",
                f"{self.fn_avg:.6f}",
                f"{self.wfn_avg:.6f}",
                f"{self.nn_avg:.6f}",
                f"{self.aspl:.6f}",
            ]
        )


@dataclass(frozen=True)
class CreditWeights:
    """Per-paper authorship credit weights for one author, matrix-aligned."""

    paper_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.paper_ids) != len(self.values):
            raise ValueError("one weight per paper id required")
        v = np.asarray(self.values, dtype=np.float64)
        if np.any(v <= 0.0) or np.any(v > 1.0):
            raise ValueError("credit weights must lie in (0, 1]")


def harmonic_credit(position: int, n_authors: int) -> float:
    """Harmonic authorship credit share: (1/position) / sum(1/k for k=1..N).

    Shares over one paper sum to 1 and decrease strictly with position;
    a sole author gets exactly 1.
    """
    if n_authors < 1:
        raise ValueError(f"n_authors must be >= 1, got {n_authors}")
    if not 1 <= position <= n_authors:
        raise ValueError(f"position {position} out of range 1..{n_authors}")
    denom = sum(1.0 / k for k in range(1, n_authors + 1))
    return (1.0 / position) / denom


def credit_weights(profile: AuthorProfile, paper_ids=None) -> CreditWeights:
    """Harmonic credit of the focal author on each paper, aligned to ``paper_ids``.

    With ``paper_ids`` omitted, all profile papers are used in profile order.
    """
    by_id = {rec.paper_id: (rec, pos) for rec, pos in profile.papers}
    if paper_ids is None:
        paper_ids = profile.paper_ids()
    weights = np.array(
        [
            harmonic_credit(by_id[pid][1], len(by_id[pid][0].authors))
            for pid in paper_ids
        ]
    )
    return CreditWeights(paper_ids=tuple(paper_ids), values=weights)


def _offdiag(sim: SimilarityMatrix) -> np.ndarray:
    masked = sim.values.copy()
    np.fill_diagonal(masked, np.nan)
    return masked


def mean_pairwise(sim: SimilarityMatrix) -> float:
    """Mean cosine over the n(n-1)/2 unordered paper pairs."""
    n = sim.order
    iu = np.triu_indices(n, k=1)
    return float(np.mean(sim.values[iu]))


def _row_minima(sim: SimilarityMatrix) -> np.ndarray:
    masked = _offdiag(sim)
    return np.nanmin(masked, axis=1)


def _row_maxima(sim: SimilarityMatrix) -> np.ndarray:
    masked = _offdiag(sim)
    return np.nanmax(masked, axis=1)


def furthest_neighbor_avg(sim: SimilarityMatrix) -> float:
    """Unweighted mean of per-paper furthest-neighbor (minimum) similarities."""
    return float(np.mean(_row_minima(sim)))


def weighted_furthest_neighbor_avg(sim: SimilarityMatrix, weights: CreditWeights) -> float:
    """Credit-weighted mean of per-paper furthest-neighbor similarities.

    Weights only change how per-paper scores are averaged; every paper still
    participates as a potential furthest neighbor of the others.
    """
    if weights.paper_ids != sim.paper_ids:
        if len(weights.values) != sim.order:
            raise ValueError(
                f"{len(weights.values)} weights for a matrix of order {sim.order}"
            )
        raise ValueError("weight paper ids are not aligned with the matrix")
    w = np.asarray(weights.values, dtype=np.float64)
    total = w.sum()
    if total <= 0.0:
        raise ValueError("weights must sum to a positive value")
    return float(np.dot(w, _row_minima(sim)) / total)


def nearest_neighbor_avg(sim: SimilarityMatrix) -> float:
    """Unweighted mean of per-paper nearest-neighbor (maximum) similarities."""
    return float(np.mean(_row_maxima(sim)))


def _dijkstra_dense(weights: np.ndarray, source: int) -> np.ndarray:
    # array-based single-source Dijkstra; the graph is complete, so scanning
    # all nodes per step beats a heap
    n = weights.shape[0]
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    visited = np.zeros(n, dtype=bool)
    for _ in range(n):
        candidates = np.where(visited, np.inf, dist)
        u = int(np.argmin(candidates))
        if not np.isfinite(candidates[u]):
            break
        visited[u] = True
        relaxed = dist[u] + weights[u]
        better = (~visited) & (relaxed < dist)
        dist[better] = relaxed[better]
    return dist


def shortest_path_matrix(dist: DistanceMatrix) -> np.ndarray:
    """Exact all-pairs shortest-path lengths via Dijkstra from every node."""
    w = dist.values
    if w.min() < 0.0:
        raise ValueError("negative edge weight")
    n = dist.order
    out = np.empty((n, n))
    for source in range(n):
        out[source] = _dijkstra_dense(w, source)
    return out


def avg_shortest_path(dist: DistanceMatrix) -> float:
    """Mean shortest-path length over unordered paper pairs."""
    n = dist.order
    sp = shortest_path_matrix(dist)
    # off-diagonal mean; averaging sp[i,j] with sp[j,i] absorbs any low-order
    # float asymmetry from per-source summation order
    return float((sp.sum() - np.trace(sp)) / (n * (n - 1)))


def score_author(profile: AuthorProfile, corpus: Corpus) -> BreadthScores:
    """Compute all five measures for one author profile."""
    sim = similarity_matrix(profile, corpus)
    weights = credit_weights(profile, sim.paper_ids)
    dist = to_distance(sim)
    return BreadthScores(
        author_id=profile.author_id,
        n_papers=sim.order,
        mean_pairwise=mean_pairwise(sim),
        fn_avg=furthest_neighbor_avg(sim),
        wfn_avg=weighted_furthest_neighbor_avg(sim, weights),
        nn_avg=nearest_neighbor_avg(sim),
        aspl=avg_shortest_path(dist),
    )
