"""Python bindings for the qsum extractive summarizer core."""

from ._qsum import (
    adequacy,
    chunk_sentence,
    fluency,
    gold_summary,
    heuristic_labels,
    positional_embedding,
    rouge,
)

__all__ = [
    "adequacy",
    "chunk_sentence",
    "fluency",
    "gold_summary",
    "heuristic_labels",
    "positional_embedding",
    "rouge",
]
