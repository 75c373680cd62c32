"""Acceptance: the adapter's output behaves like a real embedding file.

Single numbered criterion, continuing the numbering of the main
package's acceptance suite.
"""

import json

import numpy as np

from breadth.corpus import load_corpus
from breadth.knowledge_space import cosine
from embed_adapter.cli import main


def test_criterion_13_embedding_adapter(tmp_path):
    docs = [
        {
            "paper_id": "dup-a",
            "title": "Folding kinetics of small proteins",
            "abstract": "We measure folding rates of small globular proteins "
            "and relate them to contact order.",
        },
        {
            "paper_id": "dup-b",
            "title": "Folding kinetics of small proteins revisited",
            "abstract": "We measure folding rates of small globular proteins "
            "and relate them to contact order and chain length.",
        },
        {
            "paper_id": "other",
            "title": "Auction design for wholesale electricity markets",
            "abstract": "We study bidding behavior and price formation in "
            "day-ahead electricity auctions under transmission constraints.",
        },
    ]
    texts = tmp_path / "texts.jsonl"
    texts.write_text("".join(json.dumps(d) + "\n" for d in docs))
    papers = tmp_path / "papers.jsonl"
    papers.write_text(
        "".join(
            json.dumps({"paper_id": d["paper_id"], "year": 2020, "authors": ["a1"]})
            + "\n"
            for d in docs
        )
    )

    out = tmp_path / "embeddings.jsonl"
    assert main(["--in", str(texts), "--out", str(out)]) == 0

    # the produced file loads cleanly through the downstream corpus loader
    corpus = load_corpus(papers, out)
    assert corpus.report.papers_without_embedding == ()
    assert corpus.report.embeddings_without_paper == ()
    assert corpus.dim == 768

    dup_a = corpus.embedding_for("dup-a")
    dup_b = corpus.embedding_for("dup-b")
    other = corpus.embedding_for("other")
    assert cosine(dup_a, dup_b) > cosine(dup_a, other)
    assert cosine(dup_a, dup_b) > cosine(dup_b, other)

    rerun = tmp_path / "rerun.jsonl"
    assert main(["--in", str(texts), "--out", str(rerun)]) == 0
    second = load_corpus(papers, rerun)
    for pid in ("dup-a", "dup-b", "other"):
        assert np.array_equal(
            corpus.embedding_for(pid).vector, second.embedding_for(pid).vector
        )
    assert out.read_bytes() == rerun.read_bytes()
