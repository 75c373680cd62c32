"""Publication corpus ingestion and indexing.

Two line-delimited JSON input files make up a corpus:

* papers file: one object per line with keys ``paper_id`` (str), ``year``
  (int), ``authors`` (list of str, order significant, position 1 = first
  author), ``references`` (list of str, may point outside the corpus), and
  optional ``title``, ``abstract``, ``field_label``.
* embeddings file: one object per line with keys ``paper_id`` and ``vector``
  (list of numbers). The first record may be a header ``{"dim": D}``;
  otherwise the dimension is inferred from the first vector and enforced for
  the rest.

A packed binary embedding format is also supported: magic bytes ``EMB1``,
a little-endian uint32 dimension, then repeated records of
[uint16 id length, id bytes, dim float32 values]. The loader sniffs the
magic bytes, so the same path argument accepts either format.

A loaded corpus is write-once: records are frozen and the index is never
mutated after construction, so concurrent readers are safe.
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    BelowMinPapersError,
    CorpusFormatError,
    NoFieldLabelError,
    UnknownAuthorError,
)

YEAR_MIN = 1900
YEAR_MAX = 2100

_EMB_MAGIC = b"EMB1"


@dataclass(frozen=True)
class PaperRecord:
    """One publication: identity, authorship order, and cited references."""

    paper_id: str
    year: int
    authors: tuple[str, ...]
    references: tuple[str, ...] = ()
    title: str | None = None
    abstract: str | None = None
    field_label: str | None = None

    def position_of(self, author_id: str) -> int:
        """1-based position of ``author_id`` in the author list."""
        return self.authors.index(author_id) + 1


@dataclass(frozen=True)
class Embedding:
    """A fixed-length vector locating one paper in knowledge space."""

    paper_id: str
    vector: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])


@dataclass(frozen=True)
class AuthorProfile:
    """One researcher: their papers with the focal author position in each.

    ``papers`` is ordered by (year, paper_id) ascending so that every
    downstream matrix and output derived from a profile is reproducible.
    """

    author_id: str
    papers: tuple[tuple[PaperRecord, int], ...]
    field_code: str | None
    first_year: int
    last_year: int

    @property
    def n_papers(self) -> int:
        return len(self.papers)

    def paper_ids(self) -> tuple[str, ...]:
        return tuple(rec.paper_id for rec, _ in self.papers)


@dataclass(frozen=True)
class LoadReport:
    """Counts and unmatched ids from one corpus load."""

    n_papers: int
    n_embeddings: int
    papers_without_embedding: tuple[str, ...]
    embeddings_without_paper: tuple[str, ...]

    def summary(self) -> str:
        return (
            f"{self.n_papers} papers, {self.n_embeddings} embeddings, "
            f"{len(self.papers_without_embedding)} papers without embedding, "
            f"{len(self.embeddings_without_paper)} embeddings without paper"
        )


@dataclass(frozen=True)
class Corpus:
    """Indexed, immutable collection of papers and embeddings."""

    papers: dict[str, PaperRecord]
    embeddings: dict[str, Embedding]
    dim: int | None
    by_author: dict[str, tuple[tuple[str, int], ...]]
    report: LoadReport

    def embedding_for(self, paper_id: str) -> Embedding | None:
        return self.embeddings.get(paper_id)

    def author_ids(self) -> list[str]:
        return sorted(self.by_author)


def _parse_paper(obj, path, line_no) -> PaperRecord:
    if not isinstance(obj, dict):
        raise CorpusFormatError("record is not an object", path, line_no)
    try:
        paper_id = obj["paper_id"]
        year = obj["year"]
        authors = obj["authors"]
    except KeyError as exc:
        raise CorpusFormatError(f"missing key {exc}", path, line_no) from None
    if not isinstance(paper_id, str) or not paper_id:
        raise CorpusFormatError("paper_id must be a non-empty string", path, line_no)
    if not isinstance(year, int) or isinstance(year, bool):
        raise CorpusFormatError(f"year must be an integer, got {year!r}", path, line_no)
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise CorpusFormatError(
            f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]", path, line_no
        )
    if not isinstance(authors, list) or not authors:
        raise CorpusFormatError("authors must be a non-empty list", path, line_no)
    if any(not isinstance(a, str) or not a for a in authors):
        raise CorpusFormatError("author ids must be non-empty strings", path, line_no)
    if len(set(authors)) != len(authors):
        dup = next(a for a, c in Counter(authors).items() if c > 1)
        raise CorpusFormatError(
            f"author {dup!r} listed twice on paper {paper_id!r}", path, line_no
        )
    references = obj.get("references", [])
    if not isinstance(references, list) or any(
        not isinstance(r, str) for r in references
    ):
        raise CorpusFormatError("references must be a list of strings", path, line_no)
    return PaperRecord(
        paper_id=paper_id,
        year=year,
        authors=tuple(authors),
        references=tuple(references),
        title=obj.get("title"),
        abstract=obj.get("abstract"),
        field_label=obj.get("field_label"),
    )


def load_papers(path) -> list[PaperRecord]:
    """Read a line-delimited papers file, validating every record."""
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc.msg}", path, line_no) from None
            rec = _parse_paper(obj, path, line_no)
            if rec.paper_id in seen:
                raise CorpusFormatError(
                    f"duplicate paper_id {rec.paper_id!r}", path, line_no
                )
            seen.add(rec.paper_id)
            records.append(rec)
    return records


def _check_vector(paper_id, vec, dim, path, line_no=None) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise CorpusFormatError(
            f"vector of {paper_id!r} must be a flat non-empty array", path, line_no
        )
    if not np.all(np.isfinite(arr)):
        raise CorpusFormatError(
            f"vector of {paper_id!r} contains non-finite values", path, line_no
        )
    if dim is not None and arr.size != dim:
        raise CorpusFormatError(
            f"dim mismatch for {paper_id!r}: expected {dim}, got {arr.size}",
            path,
            line_no,
        )
    if float(np.linalg.norm(arr)) == 0.0:
        raise CorpusFormatError(f"zero-norm vector for {paper_id!r}", path, line_no)
    arr.setflags(write=False)
    return arr


def _load_embeddings_jsonl(path) -> list[Embedding]:
    out = []
    dim = None
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc.msg}", path, line_no) from None
            if not isinstance(obj, dict):
                raise CorpusFormatError("record is not an object", path, line_no)
            if line_no == 1 and set(obj) == {"dim"}:
                if not isinstance(obj["dim"], int) or obj["dim"] <= 0:
                    raise CorpusFormatError("header dim must be a positive int", path, line_no)
                dim = obj["dim"]
                continue
            try:
                paper_id = obj["paper_id"]
                vec = obj["vector"]
            except KeyError as exc:
                raise CorpusFormatError(f"missing key {exc}", path, line_no) from None
            if paper_id in seen:
                raise CorpusFormatError(
                    f"duplicate embedding for {paper_id!r}", path, line_no
                )
            arr = _check_vector(paper_id, vec, dim, path, line_no)
            dim = arr.size if dim is None else dim
            seen.add(paper_id)
            out.append(Embedding(paper_id=paper_id, vector=arr))
    return out


def _load_embeddings_binary(path) -> list[Embedding]:
    out = []
    seen = set()
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _EMB_MAGIC:
            raise CorpusFormatError("bad magic bytes in binary embedding file", path)
        header = fh.read(4)
        if len(header) != 4:
            raise CorpusFormatError("truncated header", path)
        (dim,) = struct.unpack("<I", header)
        if dim == 0:
            raise CorpusFormatError("header dim must be positive", path)
        while True:
            len_bytes = fh.read(2)
            if not len_bytes:
                break
            if len(len_bytes) != 2:
                raise CorpusFormatError("truncated record length", path)
            (id_len,) = struct.unpack("<H", len_bytes)
            id_bytes = fh.read(id_len)
            if len(id_bytes) != id_len:
                raise CorpusFormatError("truncated record id", path)
            paper_id = id_bytes.decode("utf-8")
            buf = fh.read(4 * dim)
            if len(buf) != 4 * dim:
                raise CorpusFormatError(f"truncated vector for {paper_id!r}", path)
            if paper_id in seen:
                raise CorpusFormatError(f"duplicate embedding for {paper_id!r}", path)
            vec = np.frombuffer(buf, dtype="<f4").astype(np.float64)
            arr = _check_vector(paper_id, vec, dim, path)
            seen.add(paper_id)
            out.append(Embedding(paper_id=paper_id, vector=arr))
    return out


def load_embeddings(path) -> list[Embedding]:
    """Read an embeddings file, auto-detecting JSONL vs packed binary."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _EMB_MAGIC:
        return _load_embeddings_binary(path)
    return _load_embeddings_jsonl(path)


def load_corpus(papers_path, embeddings_path=None) -> Corpus:
    """Load and join papers and embeddings into an immutable corpus.

    ``embeddings_path`` may be None for reference-only analyses; papers
    without an embedding stay in the corpus either way and are only excluded
    from similarity-based computation.
    """
    papers = load_papers(papers_path)
    embeddings = load_embeddings(embeddings_path) if embeddings_path else []
    return build_corpus(papers, embeddings)


def build_corpus(papers, embeddings=()) -> Corpus:
    """Join in-memory paper and embedding records into a Corpus."""
    papers = list(papers)
    embeddings = list(embeddings)
    paper_index = {rec.paper_id: rec for rec in papers}
    emb_index = {emb.paper_id: emb for emb in embeddings}
    dim = embeddings[0].dim if embeddings else None
    for emb in embeddings:
        if emb.dim != dim:
            raise CorpusFormatError(
                f"embedding {emb.paper_id!r} has dim {emb.dim}, expected {dim}"
            )

    by_author: dict[str, list[tuple[str, int]]] = {}
    for rec in papers:
        for pos, author in enumerate(rec.authors, start=1):
            by_author.setdefault(author, []).append((rec.paper_id, pos))

    report = LoadReport(
        n_papers=len(papers),
        n_embeddings=len(embeddings),
        papers_without_embedding=tuple(
            rec.paper_id for rec in papers if rec.paper_id not in emb_index
        ),
        embeddings_without_paper=tuple(
            emb.paper_id for emb in embeddings if emb.paper_id not in paper_index
        ),
    )
    return Corpus(
        papers=paper_index,
        embeddings=emb_index,
        dim=dim,
        by_author={a: tuple(v) for a, v in by_author.items()},
        report=report,
    )


def build_author_profile(corpus: Corpus, author_id: str, min_papers: int = 10) -> AuthorProfile:
    """Collect the corpus papers of one author into a profile.

    Raises UnknownAuthorError when the author appears nowhere, and
    BelowMinPapersError when they appear on fewer than ``min_papers`` papers.
    The two cases are distinct: the latter signals exclusion by threshold.
    """
    incidences = corpus.by_author.get(author_id)
    if not incidences:
        raise UnknownAuthorError(f"author {author_id!r} appears in no paper")
    if len(incidences) < min_papers:
        raise BelowMinPapersError(
            f"author {author_id!r} has {len(incidences)} papers, "
            f"below threshold {min_papers}"
        )
    entries = [(corpus.papers[pid], pos) for pid, pos in incidences]
    entries.sort(key=lambda e: (e[0].year, e[0].paper_id))
    years = [rec.year for rec, _ in entries]
    labels = [rec.field_label for rec, _ in entries if rec.field_label is not None]
    field_code = _modal_label(labels) if labels else None
    return AuthorProfile(
        author_id=author_id,
        papers=tuple(entries),
        field_code=field_code,
        first_year=min(years),
        last_year=max(years),
    )


def _modal_label(labels) -> str:
    counts = Counter(labels)
    best = max(counts.values())
    # lexicographically smallest among the most frequent, for determinism
    return min(label for label, c in counts.items() if c == best)


def derive_field_code(profile: AuthorProfile) -> str:
    """Modal field label over the profile's papers; ties break lexicographically."""
    labels = [rec.field_label for rec, _ in profile.papers if rec.field_label is not None]
    if not labels:
        raise NoFieldLabelError(
            f"no paper of author {profile.author_id!r} carries a field label"
        )
    return _modal_label(labels)


def write_papers(path, records) -> None:
    """Serialize papers to the line-delimited JSON format, round-trip exact."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {
                "paper_id": rec.paper_id,
                "year": rec.year,
                "authors": list(rec.authors),
                "references": list(rec.references),
            }
            if rec.title is not None:
                obj["title"] = rec.title
            if rec.abstract is not None:
                obj["abstract"] = rec.abstract
            if rec.field_label is not None:
                obj["field_label"] = rec.field_label
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def write_embeddings(path, embeddings, *, binary: bool = False) -> None:
    """Serialize embeddings.

    JSONL output starts with a ``{"dim": D}`` header and round-trips float64
    values exactly (shortest-repr JSON floats). Binary output stores float32,
    so values read back may differ in low-order bits.
    """
    embeddings = list(embeddings)
    if not embeddings:
        raise ValueError("refusing to write an empty embeddings file")
    dim = embeddings[0].dim
    if binary:
        with open(path, "wb") as fh:
            fh.write(_EMB_MAGIC)
            fh.write(struct.pack("<I", dim))
            for emb in embeddings:
                id_bytes = emb.paper_id.encode("utf-8")
                fh.write(struct.pack("<H", len(id_bytes)))
                fh.write(id_bytes)
                fh.write(emb.vector.astype("<f4").tobytes())
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": dim}) + "\n")
        for emb in embeddings:
            obj = {"paper_id": emb.paper_id, "vector": [float(v) for v in emb.vector]}
            fh.write(json.dumps(obj) + "\n")
