"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

from typing import Sequence

from .ingest import Talk
from .pivot import AlignedTriple


def check_segments(segments, name="segments") -> list[str]:
    if isinstance(segments, str):
        raise TypeError(f"{name} must be a sequence of strings, not a single string")
    segments = list(segments)
    if not segments:
        raise ValueError(f"{name} is empty")
    for k, seg in enumerate(segments):
        if not isinstance(seg, str):
            raise TypeError(f"{name}[{k}] is {type(seg).__name__}, expected str")
        if not seg.strip():
            raise ValueError(f"{name}[{k}] is empty")
    return segments


def check_talk(talk, name="talk") -> Talk:
    if not isinstance(talk, Talk):
        raise TypeError(f"{name} must be a Talk, got {type(talk).__name__}")
    if not talk.captions:
        raise ValueError(f"{name} {talk.talk_id!r} has no captions")
    return talk


def check_quad(item) -> tuple[Talk, Talk, Talk, Talk]:
    """Accept ``(pivot, a, b)`` (shared pivot stream) or ``(pivot_a, a, pivot_b, b)``."""
    item = tuple(item)
    if len(item) == 3:
        pivot, a, b = item
        item = (pivot, a, pivot, b)
    if len(item) != 4:
        raise ValueError(f"expected (pivot, a, b) or (pivot_a, a, pivot_b, b), got {len(item)} items")
    names = ("pivot_a", "a", "pivot_b", "b")
    return tuple(check_talk(t, n) for t, n in zip(item, names))


def check_triples(triples: Sequence, name="triples") -> list[AlignedTriple]:
    triples = list(triples)
    for k, t in enumerate(triples):
        if not isinstance(t, AlignedTriple):
            raise TypeError(f"{name}[{k}] is {type(t).__name__}, expected AlignedTriple")
    return triples
