"""Sentence rebuilding from synchronized caption units."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .pivot import AlignedTriple

SIDES = ("pivot", "a", "b")

# . ! ? … ؟ ۔
DEFAULT_STRONG = frozenset(".!?…؟۔")
# " ' ” ’ ) ] »
DEFAULT_CLOSERS = frozenset("\"'”’)]»")

SENTENCE_COLUMNS = ("talk_id", "triple_ids", "pivot_text", "a_text", "b_text", "divergent")


class RebuildError(ValueError):
    pass


@dataclass(frozen=True)
class PunctProfile:
    strong: frozenset = DEFAULT_STRONG
    closers: frozenset = DEFAULT_CLOSERS

    @classmethod
    def from_dict(cls, data: dict) -> "PunctProfile":
        try:
            return cls(frozenset(_char(c) for c in data["strong"]), frozenset(_char(c) for c in data["closers"]))
        except KeyError as exc:
            raise RebuildError(f"punctuation profile lacks the {exc.args[0]!r} list") from None

    @classmethod
    def load(cls, path: str | Path) -> "PunctProfile":
        """Read a JSON file ``{"strong": [...], "closers": [...]}``.

        Entries may be code points as integers, ``"U+XXXX"`` strings, or
        single characters.
        """
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"strong": [f"U+{ord(c):04X}" for c in sorted(self.strong)],
                "closers": [f"U+{ord(c):04X}" for c in sorted(self.closers)]}


def _char(entry) -> str:
    if isinstance(entry, int):
        return chr(entry)
    if isinstance(entry, str):
        if len(entry) == 1:
            return entry
        if entry.upper().startswith("U+"):
            return chr(int(entry[2:], 16))
    raise RebuildError(f"cannot read {entry!r} as a code point")


@dataclass(frozen=True)
class RebuildStrategy:
    """``none``, ``strong-punct`` on one side, or ``pivot`` (strong punctuation of the pivot side)."""

    kind: str
    side: str | None = None

    def __post_init__(self):
        if self.kind not in ("none", "strong-punct", "pivot"):
            raise RebuildError(f"unknown rebuild strategy {self.kind!r}")
        if self.kind == "strong-punct" and self.side not in SIDES:
            raise RebuildError(f"strong-punct needs a side in {SIDES}, got {self.side!r}")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def strong_punct(cls, side: str):
        return cls("strong-punct", side)

    @classmethod
    def pivot(cls):
        return cls("pivot")

    @property
    def boundary_side(self) -> str | None:
        if self.kind == "pivot":
            return "pivot"
        return self.side

    @property
    def name(self) -> str:
        return self.kind if self.side is None else f"{self.kind}:{self.side}"

    @classmethod
    def parse(cls, text: str, side_aliases: dict[str, str] | None = None) -> "RebuildStrategy":
        """Parse ``none``, ``pivot`` or ``strong-punct:<side>``; aliases map e.g. ``he`` to ``b``."""
        kind, _, side = text.partition(":")
        if kind in ("none", "pivot"):
            if side:
                raise RebuildError(f"strategy {kind!r} takes no side")
            return cls(kind)
        if kind in ("strong-punct", "strngP"):
            side = (side_aliases or {}).get(side, side)
            return cls("strong-punct", side)
        raise RebuildError(f"unknown rebuild strategy {text!r}")


@dataclass(frozen=True)
class SentenceUnit:
    pivot_text: str
    a_text: str
    b_text: str
    source_triple_ids: tuple[int, ...]
    divergent: bool = False
    talk_id: str = field(default="", compare=False)

    def __post_init__(self):
        ids = tuple(self.source_triple_ids)
        object.__setattr__(self, "source_triple_ids", ids)
        if not ids:
            raise RebuildError("a sentence unit needs at least one source triple")
        if any(y != x + 1 for x, y in zip(ids, ids[1:])):
            raise RebuildError(f"source triple ids must be consecutive, got {ids}")

    def text(self, side: str) -> str:
        return {"pivot": self.pivot_text, "a": self.a_text, "b": self.b_text}[side]


def is_strong_terminal(text: str, punct: PunctProfile | None = None) -> bool:
    """True when text ends in strong punctuation, ignoring trailing closers and whitespace."""
    punct = punct or PunctProfile()
    end = len(text)
    while end and (text[end - 1].isspace() or text[end - 1] in punct.closers):
        end -= 1
    return end > 0 and text[end - 1] in punct.strong


def _join(parts: Iterable[str]) -> str:
    return " ".join(p for p in parts if p)


def _unit(triples: Sequence[AlignedTriple], ids: list[int], talk_id: str) -> SentenceUnit:
    group = [triples[k] for k in ids]
    return SentenceUnit(
        pivot_text=_join(t.pivot_text for t in group),
        a_text=_join(t.a_text for t in group),
        b_text=_join(t.b_text for t in group),
        source_triple_ids=tuple(ids),
        divergent=any(t.divergent for t in group),
        talk_id=talk_id,
    )


def rebuild(triples: Sequence[AlignedTriple], strategy: RebuildStrategy,
            punct: PunctProfile | None = None, talk_id: str = "") -> list[SentenceUnit]:
    """Group consecutive triples of one talk into sentences.

    A sentence closes after a triple whose boundary-side text ends in strong
    punctuation; a trailing open group is emitted as the last sentence.
    Captions are never split internally.
    """
    punct = punct or PunctProfile()
    if strategy.kind == "none":
        return [_unit(triples, [k], talk_id) for k in range(len(triples))]
    side = strategy.boundary_side
    if side not in SIDES:
        raise RebuildError(f"unknown side {side!r}")
    units, current = [], []
    for k, triple in enumerate(triples):
        current.append(k)
        if is_strong_terminal(triple.text(side), punct):
            units.append(_unit(triples, current, talk_id))
            current = []
    if current:
        units.append(_unit(triples, current, talk_id))
    return units


def units_to_tsv(units: Iterable[SentenceUnit]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(SENTENCE_COLUMNS)
    for u in units:
        writer.writerow((u.talk_id, ",".join(map(str, u.source_triple_ids)), u.pivot_text, u.a_text, u.b_text,
                         int(u.divergent)))
    return buf.getvalue()


def units_from_tsv(text: str) -> list[SentenceUnit]:
    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
    header = next(reader, None)
    if header is None or tuple(header) != SENTENCE_COLUMNS:
        raise RebuildError("sentence file must start with the header " + "\t".join(SENTENCE_COLUMNS))
    units = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(SENTENCE_COLUMNS):
            raise RebuildError(f"sentence file line {lineno}: expected {len(SENTENCE_COLUMNS)} fields")
        talk_id, ids, p, a, b, flag = rec
        units.append(SentenceUnit(p, a, b, tuple(int(x) for x in ids.split(",")), flag == "1", talk_id))
    return units
