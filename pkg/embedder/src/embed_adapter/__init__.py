"""Embedding adapter: titles and abstracts in, corpus embedding files out."""

from embed_adapter.adapter import (
    BatchReport,
    InputError,
    TextInput,
    embed_batch,
    write_embeddings,
)
from embed_adapter.encoder import DEFAULT_MODEL_ID, HashedNgramEncoder, ModelLoadError

__all__ = [
    "BatchReport",
    "DEFAULT_MODEL_ID",
    "HashedNgramEncoder",
    "InputError",
    "ModelLoadError",
    "TextInput",
    "embed_batch",
    "write_embeddings",
]
