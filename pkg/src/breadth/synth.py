"""Synthetic author careers with controlled ground-truth breadth.

Each author's papers live near latent topic directions on the unit sphere:
every author has a random anchor direction, topic directions are the anchor
plus isotropic offsets of root-mean-square pairwise distance
``topic_separation`` (renormalized to unit length, so the knob controls the
angular spread between topics, which is what cosine similarity responds to),
and papers scatter around their topic direction with scale
``within_topic_spread``. The published embedding is the unit-normalized
latent position. An author's ground-truth breadth is the mean pairwise
Euclidean distance among the raw latent positions, which the similarity
measures are expected to track. Cohorts pair a broad author with a narrow
twin that shares publication count, career years, and field, so the matching
criteria are satisfiable by construction. Everything is reproducible from
seeds alone.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import pdist

from .corpus import (
    AuthorProfile,
    Corpus,
    Embedding,
    PaperRecord,
    build_corpus,
    write_embeddings,
    write_papers,
)
from .errors import DegenerateDataError

FIELD_CYCLE = ("BIO", "PHYS", "CHEM")


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for one synthetic author career.

    ``topic_separation`` sets the angular spread between topic directions
    (root-mean-square offset distance before renormalization to the unit
    sphere); ``within_topic_spread`` the expected distance of a paper from
    its topic direction. ``authors_per_paper`` bounds the author-list size
    inclusive.
    Self-citation wiring activates when ``selfcite_p_within`` > 0: each paper
    cites each earlier own paper independently, same-topic pairs with
    probability ``selfcite_p_within`` and cross-topic pairs with
    ``selfcite_p_cross``, plus ``n_external_refs`` references to ids outside
    the corpus.
    """

    n_papers: int = 16
    n_topics: int = 4
    topic_separation: float = 1.5
    within_topic_spread: float = 0.5
    dim: int = 64
    authors_per_paper: tuple[int, int] = (1, 4)
    seed: int = 0
    first_year: int = 1995
    career_span: int = 10
    field_label: str = "GEN"
    selfcite_p_within: float = 0.0
    selfcite_p_cross: float = 0.0
    n_external_refs: int = 0

    def __post_init__(self):
        if self.n_papers < 2:
            raise ValueError("n_papers must be >= 2")
        if self.n_topics < 1:
            raise ValueError("n_topics must be >= 1")
        if self.n_topics > self.n_papers:
            raise ValueError("n_topics may not exceed n_papers")
        if self.topic_separation <= 0:
            raise ValueError("topic_separation must be > 0")
        if self.within_topic_spread < 0:
            raise ValueError("within_topic_spread must be >= 0")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        lo, hi = self.authors_per_paper
        if lo < 1 or hi < lo:
            raise ValueError("authors_per_paper must satisfy 1 <= lo <= hi")
        if self.career_span < 0:
            raise ValueError("career_span must be >= 0")
        for p in (self.selfcite_p_within, self.selfcite_p_cross):
            if not 0.0 <= p <= 1.0:
                raise ValueError("citation probabilities must lie in [0, 1]")
        if self.n_external_refs < 0:
            raise ValueError("n_external_refs must be >= 0")


@dataclass(frozen=True)
class GroundTruth:
    """Latent facts about one generated author, used only by oracles."""

    author_id: str
    n_topics: int
    dispersion: float
    topics: tuple[int, ...]

    def __post_init__(self):
        if self.dispersion < 0:
            raise ValueError("dispersion must be >= 0")


def generate_author(
    config: SynthConfig, author_id: str = "a000"
) -> tuple[AuthorProfile, list[Embedding], GroundTruth]:
    """Generate one author: profile, embeddings, and latent ground truth.

    Paper years climb evenly from first_year to first_year + career_span,
    topic assignment is balanced then shuffled, and the focal author sits at
    a random position in each author list. Identical config yields identical
    output, bit for bit.
    """
    rng = np.random.default_rng(config.seed)
    n, dim = config.n_papers, config.dim

    anchor = rng.normal(0.0, 1.0, size=dim)
    anchor_norm = np.linalg.norm(anchor)
    if anchor_norm == 0.0:
        raise DegenerateDataError("anchor direction degenerate; cannot normalize")
    anchor /= anchor_norm
    # offsets have RMS pairwise distance = topic_separation before the
    # renormalization; larger separation means wider angles between topics
    sigma_o = config.topic_separation / np.sqrt(2.0 * dim)
    centers = anchor + rng.normal(0.0, sigma_o, size=(config.n_topics, dim))
    center_norms = np.linalg.norm(centers, axis=1)
    if np.any(center_norms == 0.0):
        raise DegenerateDataError("topic direction at the origin; cannot normalize")
    centers = centers / center_norms[:, None]
    topics = np.array([j % config.n_topics for j in range(n)])
    rng.shuffle(topics)
    noise_scale = config.within_topic_spread / np.sqrt(dim)
    latents = centers[topics] + rng.normal(0.0, noise_scale, size=(n, dim))
    norms = np.linalg.norm(latents, axis=1)
    if np.any(norms == 0.0):
        raise DegenerateDataError("latent position at the origin; cannot normalize")
    unit = latents / norms[:, None]

    if n > 1:
        years = [
            config.first_year + round(j * config.career_span / (n - 1))
            for j in range(n)
        ]
    else:
        years = [config.first_year]

    lo, hi = config.authors_per_paper
    records: list[PaperRecord] = []
    positions: list[int] = []
    embeddings: list[Embedding] = []
    for j in range(n):
        paper_id = f"p-{author_id}-{j:04d}"
        n_authors = int(rng.integers(lo, hi + 1))
        pos = int(rng.integers(1, n_authors + 1))
        authors = tuple(
            author_id if a == pos else f"co-{author_id}-{j:04d}-{a}"
            for a in range(1, n_authors + 1)
        )
        refs: list[str] = []
        if config.selfcite_p_within > 0.0:
            for i in range(j):
                if years[i] >= years[j]:
                    continue
                p = (
                    config.selfcite_p_within
                    if topics[i] == topics[j]
                    else config.selfcite_p_cross
                )
                if rng.random() < p:
                    refs.append(f"p-{author_id}-{i:04d}")
            refs.extend(
                f"x-{author_id}-{j:04d}-{k}" for k in range(config.n_external_refs)
            )
        records.append(
            PaperRecord(
                paper_id=paper_id,
                year=years[j],
                authors=authors,
                references=tuple(refs),
                field_label=config.field_label,
            )
        )
        positions.append(pos)
        vec = unit[j].copy()
        vec.setflags(write=False)
        embeddings.append(Embedding(paper_id=paper_id, vector=vec))

    profile = AuthorProfile(
        author_id=author_id,
        papers=tuple(zip(records, positions)),
        field_code=config.field_label,
        first_year=min(years),
        last_year=max(years),
    )
    truth = GroundTruth(
        author_id=author_id,
        n_topics=config.n_topics,
        dispersion=float(pdist(latents).mean()) if n > 1 else 0.0,
        topics=tuple(int(t) for t in topics),
    )
    return profile, embeddings, truth


@dataclass(frozen=True)
class Cohort:
    """A generated population: profiles plus everything needed to score it."""

    profiles: dict[str, AuthorProfile]
    papers: tuple[PaperRecord, ...]
    embeddings: tuple[Embedding, ...]
    treatment_ids: tuple[str, ...]
    control_ids: tuple[str, ...]
    truths: dict[str, GroundTruth] = field(repr=False, default_factory=dict)

    def to_corpus(self) -> Corpus:
        return build_corpus(self.papers, self.embeddings)


def generate_cohort(
    n_broad: int, n_narrow: int, base: SynthConfig, seed: int = 0
) -> Cohort:
    """Generate matched twins: broad authors (>= 4 topics) vs narrow (1 topic).

    Twin i of each kind shares a drawn publication count, first and last
    year, and field label, so every matching criterion can be met exactly.
    Unequal group sizes leave the surplus authors twinless (they draw their
    own career parameters). Broad ids are t000..., narrow ids c000...
    """
    if n_broad < 0 or n_narrow < 0:
        raise ValueError("cohort sizes must be >= 0")
    if n_broad + n_narrow == 0:
        raise ValueError("cohort must contain at least one author")
    pair_rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    n_pairs = max(n_broad, n_narrow)
    author_seeds = np.random.SeedSequence(seed).generate_state(
        2 * n_pairs, dtype=np.uint64
    )

    profiles: dict[str, AuthorProfile] = {}
    papers: list[PaperRecord] = []
    embeddings: list[Embedding] = []
    truths: dict[str, GroundTruth] = {}
    treatment_ids: list[str] = []
    control_ids: list[str] = []

    for i in range(n_pairs):
        shared = dict(
            n_papers=int(pair_rng.integers(12, 25)),
            first_year=1990 + int(pair_rng.integers(0, 21)),
            career_span=8 + int(pair_rng.integers(0, 8)),
            field_label=FIELD_CYCLE[i % len(FIELD_CYCLE)],
        )
        if i < n_broad:
            config = replace(
                base,
                n_topics=max(4, base.n_topics),
                seed=int(author_seeds[2 * i]),
                **shared,
            )
            author_id = f"t{i:03d}"
            profile, embs, truth = generate_author(config, author_id)
            profiles[author_id] = profile
            papers.extend(rec for rec, _ in profile.papers)
            embeddings.extend(embs)
            truths[author_id] = truth
            treatment_ids.append(author_id)
        if i < n_narrow:
            config = replace(
                base, n_topics=1, seed=int(author_seeds[2 * i + 1]), **shared
            )
            author_id = f"c{i:03d}"
            profile, embs, truth = generate_author(config, author_id)
            profiles[author_id] = profile
            papers.extend(rec for rec, _ in profile.papers)
            embeddings.extend(embs)
            truths[author_id] = truth
            control_ids.append(author_id)

    return Cohort(
        profiles=profiles,
        papers=tuple(papers),
        embeddings=tuple(embeddings),
        treatment_ids=tuple(treatment_ids),
        control_ids=tuple(control_ids),
        truths=truths,
    )


def write_cohort(cohort: Cohort, out_dir) -> dict[str, str]:
    """Write a cohort as corpus files plus ground truth and treatment list.

    Returns the path of each file written. Output is byte-deterministic for
    a given cohort.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "papers": os.path.join(out_dir, "papers.jsonl"),
        "embeddings": os.path.join(out_dir, "embeddings.jsonl"),
        "ground_truth": os.path.join(out_dir, "ground_truth.csv"),
        "treatment": os.path.join(out_dir, "treatment.txt"),
    }
    write_papers(paths["papers"], cohort.papers)
    write_embeddings(paths["embeddings"], cohort.embeddings)
    with open(paths["ground_truth"], "w", encoding="utf-8") as fh:
        fh.write("author_id,n_topics,latent_dispersion\n")
        for author_id in sorted(cohort.truths):
            t = cohort.truths[author_id]
            fh.write(f"{author_id},{t.n_topics},{t.dispersion:.6f}\n")
    with open(paths["treatment"], "w", encoding="utf-8") as fh:
        for author_id in cohort.treatment_ids:
            fh.write(author_id + "\n")
    return paths
