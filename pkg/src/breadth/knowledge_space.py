"""Pairwise cosine similarity and the (1 - similarity) distance transform.

Papers live in a common vector space; the cosine of two embedding vectors is
their semantic similarity, and 1 - cosine is the distance used by graph and
layout computations. All accumulation happens in double precision regardless
of how vectors were stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import AuthorProfile, Corpus, Embedding
from .errors import NotEnoughEmbeddingsError


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric matrix of pairwise cosines, diagonal exactly 1."""

    paper_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        n = len(self.paper_ids)
        if v.shape != (n, n) or n < 2:
            raise ValueError(f"matrix shape {v.shape} does not fit {n} paper ids")
        if not np.array_equal(v, v.T):
            raise ValueError("similarity matrix must be symmetric")
        if not np.all(np.diag(v) == 1.0):
            raise ValueError("similarity matrix diagonal must be exactly 1")
        if v.min() < -1.0 or v.max() > 1.0:
            raise ValueError("similarity values must lie in [-1, 1]")

    @property
    def order(self) -> int:
        return len(self.paper_ids)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of (1 - cosine) distances, diagonal exactly 0."""

    paper_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        n = len(self.paper_ids)
        if v.shape != (n, n) or n < 2:
            raise ValueError(f"matrix shape {v.shape} does not fit {n} paper ids")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be symmetric")
        if not np.all(np.diag(v) == 0.0):
            raise ValueError("distance matrix diagonal must be exactly 0")
        if v.min() < 0.0 or v.max() > 2.0:
            raise ValueError("distance values must lie in [0, 2]")

    @property
    def order(self) -> int:
        return len(self.paper_ids)


def cosine(a: Embedding, b: Embedding) -> float:
    """Cosine of two embedding vectors, clamped to [-1, 1].

    The clamp guards against floating-point overshoot for near-parallel
    vectors; negative cosines are kept as-is.
    """
    if a.dim != b.dim:
        raise ValueError(f"dim mismatch: {a.dim} vs {b.dim}")
    va = np.asarray(a.vector, dtype=np.float64)
    vb = np.asarray(b.vector, dtype=np.float64)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


def _cosine_block(embedded) -> SimilarityMatrix:
    """Shared core: (record, embedding) pairs -> validated cosine matrix."""
    embedded = sorted(embedded, key=lambda e: (e[0].year, e[0].paper_id))
    ids = tuple(rec.paper_id for rec, _ in embedded)
    vectors = np.stack([emb.vector for _, emb in embedded]).astype(np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm embedding vector")
    unit = vectors / norms[:, None]
    sims = unit @ unit.T
    sims = (sims + sims.T) / 2.0
    np.clip(sims, -1.0, 1.0, out=sims)
    np.fill_diagonal(sims, 1.0)
    sims.setflags(write=False)
    return SimilarityMatrix(paper_ids=ids, values=sims)


def similarity_matrix(profile: AuthorProfile, corpus: Corpus) -> SimilarityMatrix:
    """All-pairs cosine matrix over the profile's embedded papers.

    Rows and columns are ordered by (year, paper_id) ascending; papers
    without an embedding are left out. At least two embedded papers are
    required, otherwise no pairwise structure exists.
    """
    embedded = [
        (rec, corpus.embeddings[rec.paper_id])
        for rec, _ in profile.papers
        if rec.paper_id in corpus.embeddings
    ]
    if len(embedded) < 2:
        raise NotEnoughEmbeddingsError(
            f"author {profile.author_id!r} has {len(embedded)} embedded papers; "
            "need at least 2"
        )
    return _cosine_block(embedded)


def similarity_among(corpus: Corpus, paper_ids) -> SimilarityMatrix:
    """Cosine matrix over an explicit paper set (e.g. the union of two authors).

    Duplicate ids collapse, papers without an embedding drop out, and the
    result's paper_ids report what survived in (year, paper_id) order.
    """
    seen = dict.fromkeys(paper_ids)
    embedded = [
        (corpus.papers[pid], corpus.embeddings[pid])
        for pid in seen
        if pid in corpus.papers and pid in corpus.embeddings
    ]
    if len(embedded) < 2:
        raise NotEnoughEmbeddingsError(
            f"{len(embedded)} of {len(seen)} papers have embeddings; need at least 2"
        )
    return _cosine_block(embedded)


def to_distance(sim: SimilarityMatrix) -> DistanceMatrix:
    """Elementwise 1 - similarity; diagonal becomes exactly 0."""
    d = 1.0 - sim.values
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return DistanceMatrix(paper_ids=sim.paper_ids, values=d)


def write_matrix_csv(matrix, path) -> None:
    """Dump a square matrix with a header row of paper ids (debug aid)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(matrix.paper_ids) + "\n")
        for row in matrix.values:
            fh.write(",".join(f"{v:.6f}" for v in row) + "\n")
