"""Corpus loading, validation, profiles, and round-trip serialization."""

import json
import struct

import numpy as np
import pytest

from breadth.corpus import (
    AuthorProfile,
    Embedding,
    PaperRecord,
    build_author_profile,
    build_corpus,
    derive_field_code,
    load_corpus,
    load_embeddings,
    load_papers,
    write_embeddings,
    write_papers,
)
from breadth.errors import (
    BelowMinPapersError,
    CorpusFormatError,
    NoFieldLabelError,
    UnknownAuthorError,
)


def paper(pid, year=2000, authors=("a1",), refs=(), field=None):
    return PaperRecord(
        paper_id=pid,
        year=year,
        authors=tuple(authors),
        references=tuple(refs),
        field_label=field,
    )


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj) + "\n")


class TestLoadPapers:
    def test_minimal_record(self, tmp_path):
        p = tmp_path / "papers.jsonl"
        write_jsonl(p, [{"paper_id": "p1", "year": 1999, "authors": ["a1", "a2"]}])
        recs = load_papers(p)
        assert len(recs) == 1
        assert recs[0].paper_id == "p1"
        assert recs[0].authors == ("a1", "a2")
        assert recs[0].references == ()
        assert recs[0].field_label is None

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "papers.jsonl"
        p.write_text(
            '{"paper_id": "p1", "year": 2000, "authors": ["a1"]}\n\n'
            '{"paper_id": "p2", "year": 2001, "authors": ["a1"]}\n'
        )
        assert [r.paper_id for r in load_papers(p)] == ["p1", "p2"]

    @pytest.mark.parametrize(
        "obj,fragment",
        [
            ({"year": 2000, "authors": ["a1"]}, "missing key"),
            ({"paper_id": "", "year": 2000, "authors": ["a1"]}, "paper_id"),
            ({"paper_id": "p1", "year": "2000", "authors": ["a1"]}, "year"),
            ({"paper_id": "p1", "year": 1542, "authors": ["a1"]}, "outside"),
            ({"paper_id": "p1", "year": 2500, "authors": ["a1"]}, "outside"),
            ({"paper_id": "p1", "year": 2000, "authors": []}, "non-empty"),
            ({"paper_id": "p1", "year": 2000, "authors": ["a1", "a1"]}, "twice"),
            ({"paper_id": "p1", "year": 2000, "authors": [""]}, "non-empty strings"),
            ({"paper_id": "p1", "year": 2000, "authors": ["a1"], "references": [3]}, "references"),
        ],
    )
    def test_rejects_bad_records(self, tmp_path, obj, fragment):
        p = tmp_path / "papers.jsonl"
        write_jsonl(p, [obj])
        with pytest.raises(CorpusFormatError, match=fragment):
            load_papers(p)

    def test_error_carries_path_and_line(self, tmp_path):
        p = tmp_path / "papers.jsonl"
        write_jsonl(
            p,
            [
                {"paper_id": "p1", "year": 2000, "authors": ["a1"]},
                {"paper_id": "p2", "year": 9, "authors": ["a1"]},
            ],
        )
        with pytest.raises(CorpusFormatError) as exc_info:
            load_papers(p)
        assert str(p) in str(exc_info.value)
        assert exc_info.value.line == 2

    def test_duplicate_paper_id(self, tmp_path):
        p = tmp_path / "papers.jsonl"
        write_jsonl(
            p,
            [
                {"paper_id": "p1", "year": 2000, "authors": ["a1"]},
                {"paper_id": "p1", "year": 2001, "authors": ["a2"]},
            ],
        )
        with pytest.raises(CorpusFormatError, match="duplicate paper_id"):
            load_papers(p)

    def test_invalid_json_reports_line(self, tmp_path):
        p = tmp_path / "papers.jsonl"
        p.write_text('{"paper_id": "p1", "year": 2000, "authors": ["a1"]}\n{broken\n')
        with pytest.raises(CorpusFormatError) as exc_info:
            load_papers(p)
        assert exc_info.value.line == 2


class TestLoadEmbeddings:
    def test_jsonl_with_dim_header(self, tmp_path):
        p = tmp_path / "emb.jsonl"
        write_jsonl(
            p,
            [
                {"dim": 3},
                {"paper_id": "p1", "vector": [1.0, 0.0, 0.0]},
                {"paper_id": "p2", "vector": [0.0, 1.0, 0.0]},
            ],
        )
        embs = load_embeddings(p)
        assert [e.paper_id for e in embs] == ["p1", "p2"]
        assert embs[0].dim == 3
        assert embs[0].vector.dtype == np.float64
        assert not embs[0].vector.flags.writeable

    def test_jsonl_without_header_infers_dim(self, tmp_path):
        p = tmp_path / "emb.jsonl"
        write_jsonl(
            p,
            [
                {"paper_id": "p1", "vector": [1.0, 2.0]},
                {"paper_id": "p2", "vector": [3.0, 4.0]},
            ],
        )
        assert load_embeddings(p)[1].dim == 2

    def test_dim_mismatch_names_offender(self, tmp_path):
        p = tmp_path / "emb.jsonl"
        write_jsonl(
            p,
            [
                {"dim": 2},
                {"paper_id": "p1", "vector": [1.0, 0.0]},
                {"paper_id": "p-bad", "vector": [1.0, 0.0, 0.0]},
            ],
        )
        with pytest.raises(CorpusFormatError, match="p-bad"):
            load_embeddings(p)

    @pytest.mark.parametrize(
        "vector,fragment",
        [
            ([0.0, 0.0], "zero-norm"),
            ([1.0, float("nan")], "non-finite"),
            ([1.0, float("inf")], "non-finite"),
            ([], "non-empty"),
        ],
    )
    def test_rejects_bad_vectors(self, tmp_path, vector, fragment):
        p = tmp_path / "emb.jsonl"
        # json cannot carry nan/inf literals, so write manually
        with open(p, "w", encoding="utf-8") as fh:
            values = ", ".join(
                "NaN" if v != v else ("Infinity" if v == float("inf") else repr(v))
                for v in vector
            )
            fh.write('{"paper_id": "p1", "vector": [%s]}\n' % values)
        with pytest.raises(CorpusFormatError, match=fragment):
            load_embeddings(p)

    def test_duplicate_embedding_rejected(self, tmp_path):
        p = tmp_path / "emb.jsonl"
        write_jsonl(
            p,
            [
                {"paper_id": "p1", "vector": [1.0, 0.0]},
                {"paper_id": "p1", "vector": [0.0, 1.0]},
            ],
        )
        with pytest.raises(CorpusFormatError, match="duplicate"):
            load_embeddings(p)

    def test_binary_round_trip(self, tmp_path):
        # values exactly representable in float32 survive the packed format
        vecs = [
            Embedding("p1", np.array([0.5, -0.25, 1.0])),
            Embedding("pä2", np.array([0.125, 2.0, -8.0])),
        ]
        p = tmp_path / "emb.bin"
        write_embeddings(p, vecs, binary=True)
        loaded = load_embeddings(p)
        assert [e.paper_id for e in loaded] == ["p1", "pä2"]
        for orig, back in zip(vecs, loaded):
            assert np.array_equal(orig.vector, back.vector)

    def test_binary_truncation_detected(self, tmp_path):
        p = tmp_path / "emb.bin"
        with open(p, "wb") as fh:
            fh.write(b"EMB1")
            fh.write(struct.pack("<I", 4))
            fh.write(struct.pack("<H", 2))
            fh.write(b"p1")
            fh.write(struct.pack("<f", 1.0))  # 1 of 4 floats
        with pytest.raises(CorpusFormatError, match="truncated"):
            load_embeddings(p)

    def test_format_sniffing(self, tmp_path):
        jl = tmp_path / "a.jsonl"
        bn = tmp_path / "b.bin"
        embs = [Embedding("p1", np.array([1.0, 0.0])), Embedding("p2", np.array([0.0, 1.0]))]
        write_embeddings(jl, embs)
        write_embeddings(bn, embs, binary=True)
        assert [e.paper_id for e in load_embeddings(jl)] == ["p1", "p2"]
        assert [e.paper_id for e in load_embeddings(bn)] == ["p1", "p2"]


class TestRoundTrip:
    def test_papers_round_trip_exact(self, tmp_path):
        recs = [
            paper("p1", 2001, ("a1", "a2"), refs=("p0", "x9"), field="BIO"),
            PaperRecord(
                paper_id="p2",
                year=2002,
                authors=("a2",),
                title="On things",
                abstract="Short text.",
            ),
        ]
        p = tmp_path / "papers.jsonl"
        write_papers(p, recs)
        assert load_papers(p) == recs

    def test_embeddings_jsonl_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(42)
        embs = [
            Embedding(f"p{i}", rng.normal(size=5)) for i in range(4)
        ]
        p = tmp_path / "emb.jsonl"
        write_embeddings(p, embs)
        loaded = load_embeddings(p)
        for orig, back in zip(embs, loaded):
            assert np.array_equal(orig.vector, back.vector)

    def test_refuses_empty_embedding_write(self, tmp_path):
        with pytest.raises(ValueError):
            write_embeddings(tmp_path / "emb.jsonl", [])


class TestCorpusJoin:
    def test_report_counts_unmatched(self, tmp_path):
        pp = tmp_path / "papers.jsonl"
        ep = tmp_path / "emb.jsonl"
        write_papers(pp, [paper("p1"), paper("p2")])
        write_embeddings(ep, [Embedding("p2", np.array([1.0, 0.0])), Embedding("p3", np.array([0.0, 1.0]))])
        corpus = load_corpus(pp, ep)
        assert corpus.report.papers_without_embedding == ("p1",)
        assert corpus.report.embeddings_without_paper == ("p3",)
        assert corpus.dim == 2
        assert "2 papers" in corpus.report.summary()

    def test_papers_only_corpus(self, tmp_path):
        pp = tmp_path / "papers.jsonl"
        write_papers(pp, [paper("p1")])
        corpus = load_corpus(pp)
        assert corpus.dim is None
        assert corpus.embedding_for("p1") is None

    def test_by_author_positions(self):
        corpus = build_corpus([paper("p1", authors=("a1", "a2", "a3"))])
        assert corpus.by_author["a2"] == (("p1", 2),)
        assert corpus.by_author["a3"] == (("p1", 3),)

    def test_build_corpus_dim_check(self):
        embs = [Embedding("p1", np.array([1.0, 0.0])), Embedding("p2", np.array([1.0, 0.0, 0.0]))]
        with pytest.raises(CorpusFormatError, match="dim"):
            build_corpus([paper("p1"), paper("p2")], embs)


class TestAuthorProfile:
    def make_corpus(self):
        return build_corpus(
            [
                paper("p3", 2003, ("a1",), field="BIO"),
                paper("p1", 2001, ("a1", "a2"), field="PHYS"),
                paper("p2", 2001, ("a2", "a1"), field="BIO"),
            ]
        )

    def test_sorted_by_year_then_id(self):
        profile = build_author_profile(self.make_corpus(), "a1", min_papers=1)
        assert profile.paper_ids() == ("p1", "p2", "p3")
        assert profile.first_year == 2001
        assert profile.last_year == 2003
        # focal positions follow the author list of each paper
        assert [pos for _, pos in profile.papers] == [1, 2, 1]

    def test_unknown_author_distinct_from_below_min(self):
        corpus = self.make_corpus()
        with pytest.raises(UnknownAuthorError):
            build_author_profile(corpus, "nobody", min_papers=1)
        with pytest.raises(BelowMinPapersError):
            build_author_profile(corpus, "a2", min_papers=3)

    def test_field_code_modal_with_lexicographic_tie_break(self):
        profile = build_author_profile(self.make_corpus(), "a1", min_papers=1)
        assert profile.field_code == "BIO"  # BIO x2, PHYS x1
        tied = build_author_profile(self.make_corpus(), "a2", min_papers=1)
        assert tied.field_code == "BIO"  # BIO and PHYS tie; BIO < PHYS

    def test_field_code_none_without_labels(self):
        corpus = build_corpus([paper("p1", authors=("a1",)), paper("p2", authors=("a1",))])
        profile = build_author_profile(corpus, "a1", min_papers=1)
        assert profile.field_code is None
        with pytest.raises(NoFieldLabelError):
            derive_field_code(profile)

    def test_position_of(self):
        rec = paper("p1", authors=("x", "y", "z"))
        assert rec.position_of("y") == 2
        with pytest.raises(ValueError):
            rec.position_of("missing")

    def test_default_min_papers_is_ten(self):
        recs = [paper(f"p{i}", 2000 + i, ("a1",)) for i in range(9)]
        corpus = build_corpus(recs)
        with pytest.raises(BelowMinPapersError):
            build_author_profile(corpus, "a1")
        recs.append(paper("p9", 2011, ("a1",)))
        profile = build_author_profile(build_corpus(recs), "a1")
        assert profile.n_papers == 10
