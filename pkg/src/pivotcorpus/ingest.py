"""Subtitle ingestion: collection XML, SRT and WebVTT into normalized talks.

All parsers accept ``bytes`` (UTF-8 only, optional BOM) and return immutable
structures.  Caption text is trimmed and internal whitespace runs, newlines
included, are collapsed to a single space.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable
from xml.etree import ElementTree
from xml.sax.saxutils import escape, quoteattr

logger = logging.getLogger(__name__)

_WS = re.compile(r"\s+")
_SRT_TIME = re.compile(r"^(\d{1,2}):(\d{2}):(\d{2}),(\d{3})$")
_VTT_TIME = re.compile(r"^(?:(\d{1,2}):)?(\d{2}):(\d{2})\.(\d{3})$")
_ARROW = " --> "


class IngestError(ValueError):
    """Base class for ingestion failures."""


class SubtitleParseError(IngestError):
    """Input does not follow the expected grammar."""

    def __init__(self, message, line=None, column=None, cue=None):
        self.line = line
        self.column = column
        self.cue = cue
        where = []
        if cue is not None:
            where.append(f"cue {cue}")
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class SubtitleValidationError(IngestError):
    """Input parsed but violates a Caption/Talk/TalkCollection invariant."""

    def __init__(self, message, talk_id=None, caption_index=None):
        self.talk_id = talk_id
        self.caption_index = caption_index
        super().__init__(message)


@dataclass(frozen=True)
class Caption:
    index: int
    start_ms: int
    end_ms: int
    text: str


@dataclass(frozen=True)
class Talk:
    talk_id: str
    language: str
    captions: tuple[Caption, ...]
    title: str | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def texts(self) -> list[str]:
        return [c.text for c in self.captions]

    def __len__(self):
        return len(self.captions)


@dataclass(frozen=True)
class TalkCollection:
    language: str
    talks: dict[str, Talk]

    @property
    def talk_ids(self) -> list[str]:
        return list(self.talks)

    def __getitem__(self, talk_id):
        return self.talks[talk_id]

    def __contains__(self, talk_id):
        return talk_id in self.talks

    def __len__(self):
        return len(self.talks)


def normalize_text(text: str) -> str:
    """Strip a BOM, trim, and collapse whitespace runs to one space."""
    return _WS.sub(" ", text.replace("\ufeff", "")).strip()


def _decode(content: bytes | str) -> str:
    if isinstance(content, str):
        text = content
    else:
        try:
            text = content.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SubtitleParseError(f"input is not valid UTF-8: {exc.reason} at byte {exc.start}") from exc
    if text.startswith("\ufeff"):
        text = text[1:]
    return text


def build_talk(talk_id, language, spans, title=None, warnings=()):
    """Validate ``(start_ms, end_ms, text)`` triples and build a Talk.

    Captions are sorted by start time (stable on input order) and re-indexed
    from 0.  Negative, inverted or overlapping timestamps raise
    SubtitleValidationError naming the talk and the offending caption.
    """
    if not talk_id:
        raise SubtitleValidationError("talk_id must be non-empty")
    for pos, (start, end, text) in enumerate(spans):
        if start < 0 or end < 0:
            raise SubtitleValidationError(
                f"talk {talk_id}: caption {pos} has a negative timestamp", talk_id, pos)
        if end < start:
            raise SubtitleValidationError(
                f"talk {talk_id}: caption {pos} ends before it starts ({start} > {end})", talk_id, pos)
        if not text:
            raise SubtitleValidationError(f"talk {talk_id}: caption {pos} has empty text", talk_id, pos)
    order = sorted(range(len(spans)), key=lambda k: (spans[k][0], k))
    captions = []
    prev_end = None
    for new_index, k in enumerate(order):
        start, end, text = spans[k]
        if prev_end is not None and start < prev_end:
            raise SubtitleValidationError(
                f"talk {talk_id}: caption {new_index} overlaps the previous caption "
                f"(starts at {start}, previous ends at {prev_end})", talk_id, new_index)
        prev_end = end
        captions.append(Caption(new_index, start, end, text))
    return Talk(talk_id, language, tuple(captions), title, tuple(warnings))


def _int_attr(elem, name, talk_id, pos):
    raw = elem.get(name)
    if raw is None or not re.fullmatch(r"[+-]?\d+", raw.strip()):
        raise SubtitleValidationError(
            f"talk {talk_id}: caption {pos} has a missing or non-integer '{name}' attribute ({raw!r})",
            talk_id, pos)
    return int(raw)


def parse_collection_xml(content: bytes | str) -> TalkCollection:
    """Parse a ``<collection language=..>`` document into a TalkCollection."""
    text = _decode(content)
    try:
        root = ElementTree.fromstring(text)
    except ElementTree.ParseError as exc:
        line, column = exc.position
        raise SubtitleParseError(f"malformed XML: {exc.msg if hasattr(exc, 'msg') else exc}",
                                 line=line, column=column) from exc
    if root.tag != "collection":
        raise SubtitleParseError(f"root element must be <collection>, got <{root.tag}>")
    language = (root.get("language") or "").strip()
    if not language:
        raise SubtitleValidationError("collection has no language attribute")
    talks: dict[str, Talk] = {}
    for talk_elem in root.iter("talk"):
        talk_id = (talk_elem.get("id") or "").strip()
        if not talk_id:
            raise SubtitleValidationError("talk element without an id attribute")
        if talk_id in talks:
            raise SubtitleValidationError(f"duplicate talk_id {talk_id!r}", talk_id)
        title_elem = talk_elem.find("title")
        title = None
        if title_elem is not None:
            title = normalize_text("".join(title_elem.itertext())) or None
        spans = []
        for pos, cap in enumerate(talk_elem.findall("caption")):
            start = _int_attr(cap, "start", talk_id, pos)
            end = _int_attr(cap, "end", talk_id, pos)
            spans.append((start, end, normalize_text("".join(cap.itertext()))))
        talks[talk_id] = build_talk(talk_id, language, spans, title)
    return TalkCollection(language, talks)


def _ms_from_parts(h, m, s, ms):
    return ((int(h or 0) * 60 + int(m)) * 60 + int(s)) * 1000 + int(ms)


def _blocks(text: str):
    """Yield (first_line_number, lines) for blank-line separated blocks."""
    block, first = [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            if first is None:
                first = lineno
            block.append(line.rstrip())
        elif block:
            yield first, block
            block, first = [], None
    if block:
        yield first, block


def parse_srt(content: bytes | str, talk_id: str = "talk", language: str = "und") -> Talk:
    """Parse SRT.  Cues with empty text are skipped and recorded in ``Talk.warnings``."""
    text = _decode(content)
    spans, warnings = [], []
    for cue_no, (lineno, lines) in enumerate(_blocks(text), start=1):
        if len(lines) < 2:
            raise SubtitleParseError("cue has no timestamp line", line=lineno, cue=cue_no)
        if not lines[0].strip().isdigit():
            raise SubtitleParseError(f"expected cue counter, got {lines[0]!r}", line=lineno, cue=cue_no)
        timing = lines[1].strip()
        start_raw, sep, end_raw = timing.partition(_ARROW)
        ms = _SRT_TIME.match(start_raw.strip()), _SRT_TIME.match(end_raw.strip())
        if not sep or not all(ms):
            raise SubtitleParseError(f"malformed timestamp line {timing!r}", line=lineno + 1, cue=cue_no)
        body = normalize_text(" ".join(lines[2:]))
        if not body:
            warnings.append(f"cue {cue_no}: empty text, skipped")
            logger.warning("talk %s: SRT cue %d has empty text, skipped", talk_id, cue_no)
            continue
        spans.append((_ms_from_parts(*ms[0].groups()), _ms_from_parts(*ms[1].groups()), body))
    return build_talk(talk_id, language, spans, warnings=warnings)


def parse_vtt(content: bytes | str, talk_id: str = "talk", language: str = "und") -> Talk:
    """Parse WebVTT.  Cue identifiers, cue settings and NOTE/STYLE/REGION blocks are dropped."""
    text = _decode(content)
    blocks = list(_blocks(text))
    if not blocks or not re.match(r"^WEBVTT(?:[ \t].*)?$", blocks[0][1][0]):
        raise SubtitleParseError("missing WEBVTT header", line=1)
    # the header block ends at the first blank line; anything else in it is metadata
    cues = blocks[1:]
    spans, warnings = [], []
    cue_no = 0
    for lineno, lines in cues:
        if re.match(r"^(NOTE|STYLE|REGION)\b", lines[0]):
            continue
        cue_no += 1
        timing_at = 0 if _ARROW in lines[0] else 1
        if timing_at >= len(lines) or _ARROW not in lines[timing_at]:
            raise SubtitleParseError("cue has no timestamp line", line=lineno, cue=cue_no)
        start_raw, _, tail = lines[timing_at].strip().partition(_ARROW)
        end_raw = tail.split()[0] if tail.split() else ""
        ms = _VTT_TIME.match(start_raw.strip()), _VTT_TIME.match(end_raw)
        if not all(ms):
            raise SubtitleParseError(f"malformed timestamp line {lines[timing_at]!r}",
                                     line=lineno + timing_at, cue=cue_no)
        body = normalize_text(" ".join(lines[timing_at + 1:]))
        if not body:
            warnings.append(f"cue {cue_no}: empty text, skipped")
            logger.warning("talk %s: VTT cue %d has empty text, skipped", talk_id, cue_no)
            continue
        spans.append((_ms_from_parts(*ms[0].groups()), _ms_from_parts(*ms[1].groups()), body))
    return build_talk(talk_id, language, spans, warnings=warnings)


def intersect_collections(collections: Iterable[TalkCollection]) -> list[str]:
    """Talk ids present in every collection, sorted (numerically when all ids are integers)."""
    collections = list(collections)
    if len(collections) < 2:
        raise ValueError("intersect_collections needs at least two collections")
    common = set(collections[0].talks)
    for coll in collections[1:]:
        common &= set(coll.talks)
    return sort_talk_ids(common)


def sort_talk_ids(ids: Iterable[str]) -> list[str]:
    ids = list(ids)
    if all(i.isdigit() for i in ids):
        return sorted(ids, key=lambda i: (int(i), i))
    return sorted(ids)


# -- writers, used for round-trips and fixtures --

def _fmt_srt(ms):
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def write_srt(talk: Talk) -> str:
    out = []
    for cap in talk.captions:
        out.append(f"{cap.index + 1}\n{_fmt_srt(cap.start_ms)}{_ARROW}{_fmt_srt(cap.end_ms)}\n{cap.text}\n")
    return "\n".join(out)


def write_vtt(talk: Talk) -> str:
    out = ["WEBVTT\n"]
    for cap in talk.captions:
        out.append(f"{_fmt_srt(cap.start_ms).replace(',', '.')}{_ARROW}"
                   f"{_fmt_srt(cap.end_ms).replace(',', '.')}\n{cap.text}\n")
    return "\n".join(out)


def write_collection_xml(collection: TalkCollection) -> str:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f"<collection language={quoteattr(collection.language)}>"]
    for talk in collection.talks.values():
        lines.append(f"  <talk id={quoteattr(talk.talk_id)}>")
        if talk.title:
            lines.append(f"    <title>{escape(talk.title)}</title>")
        for cap in talk.captions:
            lines.append(f'    <caption start="{cap.start_ms}" end="{cap.end_ms}">{escape(cap.text)}</caption>')
        lines.append("  </talk>")
    lines.append("</collection>")
    return "\n".join(lines) + "\n"
