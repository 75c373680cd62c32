"""Batch embedding of paper titles and abstracts.

Output conforms to the corpus embedding file format consumed downstream:
a ``{"dim": D}`` header line, then one ``{"paper_id", "vector"}`` object
per input, in input order. Model identity and per-document fallbacks go
into a sidecar report (``<out>.report.json``) because the embedding file
format has no free-form metadata slot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from embed_adapter.encoder import DEFAULT_MODEL_ID, load_encoder

SEPARATOR = " [SEP] "


class InputError(ValueError):
    """Invalid text input or batch parameters."""


@dataclass(frozen=True)
class TextInput:
    """One document to embed. Title is mandatory, abstract optional."""

    paper_id: str
    title: str
    abstract: str | None = None

    def __post_init__(self) -> None:
        if not self.paper_id:
            raise InputError("paper_id must be nonempty")
        if not self.title or not self.title.strip():
            raise InputError(f"empty title for {self.paper_id!r}")

    @property
    def title_only(self) -> bool:
        return self.abstract is None or not self.abstract.strip()

    def text(self) -> str:
        if self.title_only:
            return self.title
        return f"{self.title}{SEPARATOR}{self.abstract}"


@dataclass(frozen=True)
class BatchReport:
    """What was embedded and under which model."""

    model_id: str
    dim: int
    n_inputs: int
    title_only: tuple[str, ...]
    truncated: tuple[str, ...]

    def to_json(self) -> str:
        payload = {
            "model_id": self.model_id,
            "dim": self.dim,
            "n_inputs": self.n_inputs,
            "title_only": list(self.title_only),
            "truncated": list(self.truncated),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def embed_batch(
    inputs: list[TextInput],
    model_id: str = DEFAULT_MODEL_ID,
    batch_size: int = 32,
) -> tuple[list[np.ndarray], BatchReport]:
    """One vector per input, in input order, plus the batch report."""
    if batch_size < 1:
        raise InputError("batch_size must be >= 1")
    seen: set[str] = set()
    for item in inputs:
        if item.paper_id in seen:
            raise InputError(f"duplicate paper_id {item.paper_id!r}")
        seen.add(item.paper_id)

    encoder = load_encoder(model_id)
    vectors: list[np.ndarray] = []
    title_only: list[str] = []
    truncated: list[str] = []
    for start in range(0, len(inputs), batch_size):
        for item in inputs[start : start + batch_size]:
            vec, was_truncated = encoder.encode(item.text())
            vectors.append(vec)
            if item.title_only:
                title_only.append(item.paper_id)
            if was_truncated:
                truncated.append(item.paper_id)
    report = BatchReport(
        model_id=encoder.model_id,
        dim=encoder.dim,
        n_inputs=len(inputs),
        title_only=tuple(title_only),
        truncated=tuple(truncated),
    )
    return vectors, report


def write_embeddings(
    path,
    inputs: list[TextInput],
    vectors: list[np.ndarray],
    report: BatchReport,
) -> None:
    if len(inputs) != len(vectors):
        raise InputError("one vector per input required")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": report.dim}) + "\n")
        for item, vec in zip(inputs, vectors):
            record = {"paper_id": item.paper_id, "vector": [float(x) for x in vec]}
            fh.write(json.dumps(record) + "\n")
    with open(f"{path}.report.json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
