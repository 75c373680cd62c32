"""Deterministic text encoders, keyed by model id.

The shipped encoder is a hashed character n-gram model: no weights to
download, bit-for-bit stable across runs and platforms, and near-duplicate
texts land close in cosine while unrelated texts do not. It stands in
wherever a pretrained checkpoint cannot be bundled; the model id recorded
with every output keeps vectors from different encoders apart.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np


class ModelLoadError(RuntimeError):
    """The requested model id has no locally available encoder."""


_WS = re.compile(r"\s+")

DEFAULT_MODEL_ID = "hashed-char-ngram-768-v1"


class HashedNgramEncoder:
    """Character n-gram feature hashing into a fixed-width unit vector.

    Text is lowercased and whitespace-collapsed, then every character
    n-gram for n in ``ngram_range`` is hashed to a bucket and a sign;
    the accumulated vector is L2-normalized. Texts longer than
    ``max_chars`` are truncated first (the caller is told).
    """

    def __init__(
        self,
        model_id: str = DEFAULT_MODEL_ID,
        dim: int = 768,
        ngram_range: tuple[int, int] = (3, 5),
        max_chars: int = 10_000,
    ) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        lo, hi = ngram_range
        if lo < 1 or hi < lo:
            raise ValueError("ngram_range must satisfy 1 <= lo <= hi")
        self.model_id = model_id
        self.dim = dim
        self.ngram_range = ngram_range
        self.max_chars = max_chars

    def prepare(self, text: str) -> tuple[str, bool]:
        """Normalized text and whether truncation was applied."""
        collapsed = _WS.sub(" ", text).strip().lower()
        return collapsed[: self.max_chars], len(collapsed) > self.max_chars

    def encode(self, text: str) -> tuple[np.ndarray, bool]:
        body, truncated = self.prepare(text)
        acc = np.zeros(self.dim)
        lo, hi = self.ngram_range
        for n in range(lo, hi + 1):
            for i in range(len(body) - n + 1):
                digest = hashlib.blake2b(
                    body[i : i + n].encode("utf-8"), digest_size=8
                ).digest()
                value = int.from_bytes(digest, "little")
                # low bits pick the bucket, the top bit the sign
                sign = 1.0 if value >> 63 else -1.0
                acc[value % self.dim] += sign
        norm = float(np.linalg.norm(acc))
        if norm == 0.0:
            # text shorter than the smallest n-gram still gets a unit vector
            acc[0] = 1.0
            norm = 1.0
        return acc / norm, truncated


def load_encoder(model_id: str) -> HashedNgramEncoder:
    if model_id != DEFAULT_MODEL_ID:
        raise ModelLoadError(f"unknown model id {model_id!r}")
    return HashedNgramEncoder(model_id)
