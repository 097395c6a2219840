"""Pivot-based synchronization of two subtitle streams.

Each non-pivot stream is aligned to its own copy of the pivot stream, the
two pivot copies are aligned to each other, and the three maps are chained
so that every output unit groups pivot, A and B captions that belong
together.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .aligner import AlignerParams, AlignmentMap, Bead, align, compose_units, invert
from .ingest import Talk, normalize_text

TRIPLE_COLUMNS = ("talk_id", "pivot_ids", "a_ids", "b_ids", "pivot_text", "a_text", "b_text", "divergent")


class PivotError(ValueError):
    pass


@dataclass(frozen=True)
class AlignedTriple:
    pivot_text: str
    a_text: str
    b_text: str
    pivot_caption_ids: tuple[int, ...] = ()
    a_caption_ids: tuple[int, ...] = ()
    b_caption_ids: tuple[int, ...] = ()
    divergent: bool = False

    def __post_init__(self):
        for name in ("pivot_caption_ids", "a_caption_ids", "b_caption_ids"):
            ids = tuple(getattr(self, name))
            object.__setattr__(self, name, ids)
            if any(x >= y for x, y in zip(ids, ids[1:])):
                raise PivotError(f"{name} must be strictly increasing, got {ids}")
        if not (self.pivot_caption_ids or self.a_caption_ids or self.b_caption_ids):
            raise PivotError("an aligned triple needs at least one caption id")

    def text(self, side: str) -> str:
        return {"pivot": self.pivot_text, "a": self.a_text, "b": self.b_text}[side]


@dataclass(frozen=True)
class DivergenceReport:
    total_units: int = 0
    differing_units: int = 0
    total_words: int = 0
    differing_words: int = 0

    def __post_init__(self):
        if not 0 <= self.differing_units <= self.total_units:
            raise PivotError("differing_units must lie in [0, total_units]")
        if not 0 <= self.differing_words <= self.total_words:
            raise PivotError("differing_words must lie in [0, total_words]")

    @property
    def unit_rate(self) -> float:
        return self.differing_units / self.total_units if self.total_units else 0.0

    @property
    def word_rate(self) -> float:
        return self.differing_words / self.total_words if self.total_words else 0.0

    def __add__(self, other: "DivergenceReport") -> "DivergenceReport":
        return DivergenceReport(self.total_units + other.total_units,
                                self.differing_units + other.differing_units,
                                self.total_words + other.total_words,
                                self.differing_words + other.differing_words)

    def summary(self) -> str:
        return (f"{self.differing_units:,} aligned pivot units out of {self.total_units:,} differ "
                f"({format_rate(self.unit_rate)}), involving {format_rate(self.word_rate)} of "
                f"{self.total_words:,} words")


def format_rate(rate: float) -> str:
    """Percentage with one decimal, e.g. ``0.4%``."""
    return f"{rate * 100:.1f}%"


def aggregate(reports: Iterable[DivergenceReport]) -> DivergenceReport:
    total = DivergenceReport()
    for report in reports:
        total = total + report
    return total


def _join(texts: Iterable[str]) -> str:
    return " ".join(t for t in texts if t)


def _span_text(talk: Talk, span: tuple[int, int]) -> str:
    return _join(c.text for c in talk.captions[span[0]:span[1]])


def _unit_flags(map_pp: AlignmentMap, pivot_a: Talk, pivot_b: Talk) -> list[tuple[bool, int, int]]:
    out = []
    for bead in map_pp.beads:
        ta = normalize_text(_span_text(pivot_a, bead.src_span))
        tb = normalize_text(_span_text(pivot_b, bead.tgt_span))
        out.append((ta != tb, len(ta.split()), len(tb.split())))
    return out


def measure_divergence(map_pp: AlignmentMap, pivot_a: Talk, pivot_b: Talk) -> DivergenceReport:
    """Count pivot self-alignment units whose two sides differ textually.

    Words are whitespace tokens of both sides; a differing unit contributes
    all of its words.
    """
    if map_pp.src_len != len(pivot_a) or map_pp.tgt_len != len(pivot_b):
        raise PivotError("map_pp does not align the two given pivot streams")
    flags = _unit_flags(map_pp, pivot_a, pivot_b)
    return DivergenceReport(
        total_units=len(flags),
        differing_units=sum(1 for diff, _, _ in flags if diff),
        total_words=sum(wa + wb for _, wa, wb in flags),
        differing_words=sum(wa + wb for diff, wa, wb in flags if diff),
    )


@dataclass
class PivotResult:
    triples: list[AlignedTriple]
    report: DivergenceReport
    map_pa: AlignmentMap
    map_pb: AlignmentMap
    map_pp: AlignmentMap
    map_ab: AlignmentMap = field(repr=False, default=None)

    def __iter__(self):
        # unpacks as (triples, report)
        return iter((self.triples, self.report))


def pivot_align(pivot_a: Talk, a: Talk, pivot_b: Talk, b: Talk, params: AlignerParams | None = None) -> PivotResult:
    """Synchronize streams A and B through the pivot language.

    1. align pivot_a with A and pivot_b with B;
    2. align pivot_a with pivot_b, lexical pass on;
    3. chain A -> pivot_a -> B and emit one triple per connected unit.

    Pivot text of a unit comes from the pivot_a captions.  A triple is marked
    divergent when any step-2 unit it draws on has textually different sides.
    """
    params = params or AlignerParams()
    for name, talk in (("pivot_a", pivot_a), ("a", a), ("pivot_b", pivot_b), ("b", b)):
        if len(talk) == 0:
            raise PivotError(f"{name} talk {talk.talk_id!r} has no captions")
    map_pa = align(pivot_a.texts, a.texts, params)
    map_pb = align(pivot_b.texts, b.texts, params)
    map_pp = align(pivot_a.texts, pivot_b.texts, params.replace(lexical_pass=True))
    pp_flags = [diff for diff, _, _ in _unit_flags(map_pp, pivot_a, pivot_b)]
    report = measure_divergence(map_pp, pivot_a, pivot_b)

    # pivot_a -> B
    p_to_b = compose_units(map_pp, map_pb)
    kept = [u for u in p_to_b if u.a_span[0] != u.a_span[1] or u.c_span[0] != u.c_span[1]]
    map_p_to_b = AlignmentMap(tuple(Bead(u.a_span, u.c_span, u.cost) for u in kept), len(pivot_a), len(b))
    kept_flags = [any(pp_flags[k] for k in u.ab_beads) for u in kept]

    # A -> pivot_a -> B
    units = compose_units(invert(map_pa), map_p_to_b)
    triples = []
    for u in units:
        pivot_ids = tuple(c.index for c in pivot_a.captions[u.b_span[0]:u.b_span[1]])
        a_ids = tuple(c.index for c in a.captions[u.a_span[0]:u.a_span[1]])
        b_ids = tuple(c.index for c in b.captions[u.c_span[0]:u.c_span[1]])
        triples.append(AlignedTriple(
            pivot_text=_span_text(pivot_a, u.b_span),
            a_text=_span_text(a, u.a_span),
            b_text=_span_text(b, u.c_span),
            pivot_caption_ids=pivot_ids,
            a_caption_ids=a_ids,
            b_caption_ids=b_ids,
            divergent=any(kept_flags[k] for k in u.bc_beads),
        ))
    map_ab = AlignmentMap(tuple(Bead(u.a_span, u.c_span, u.cost) for u in units
                                if u.a_span[0] != u.a_span[1] or u.c_span[0] != u.c_span[1]),
                          len(a), len(b))
    return PivotResult(triples, report, map_pa, map_pb, map_pp, map_ab)


# -- triple dump (TSV) --

def _ids(ids: Sequence[int]) -> str:
    return ",".join(str(i) for i in ids)


def _parse_ids(field_: str) -> tuple[int, ...]:
    return tuple(int(x) for x in field_.split(",") if x)


def triples_to_tsv(rows: Iterable[tuple[str, AlignedTriple]]) -> str:
    """Render ``(talk_id, triple)`` pairs in the triple dump format, header included."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(TRIPLE_COLUMNS)
    for talk_id, t in rows:
        writer.writerow((talk_id, _ids(t.pivot_caption_ids), _ids(t.a_caption_ids), _ids(t.b_caption_ids),
                         t.pivot_text, t.a_text, t.b_text, int(t.divergent)))
    return buf.getvalue()


def triples_from_tsv(text: str) -> list[tuple[str, AlignedTriple]]:
    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
    header = next(reader, None)
    if header is None or tuple(header) != TRIPLE_COLUMNS:
        raise PivotError("triple dump must start with the header " + "\t".join(TRIPLE_COLUMNS))
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(TRIPLE_COLUMNS):
            raise PivotError(f"triple dump line {lineno}: expected {len(TRIPLE_COLUMNS)} fields, got {len(rec)}")
        talk_id, p_ids, a_ids, b_ids, p_text, a_text, b_text, flag = rec
        rows.append((talk_id, AlignedTriple(p_text, a_text, b_text, _parse_ids(p_ids), _parse_ids(a_ids),
                                            _parse_ids(b_ids), flag == "1")))
    return rows
