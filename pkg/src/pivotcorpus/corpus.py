"""Talk-level partitioning, bitext export, and sentence length statistics."""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .rebuild import SentenceUnit

LONG_SENTENCE = 100

_SECTION = re.compile(r"^\[(dev|test):([^\]\s]+)\]$|^\[(exclude)\]$")


class CorpusError(ValueError):
    pass


class SplitSpecError(CorpusError):
    def __init__(self, message, talk_id=None):
        self.talk_id = talk_id
        super().__init__(message)


@dataclass
class SplitSpec:
    dev_sets: dict[str, list[str]] = field(default_factory=dict)
    test_sets: dict[str, list[str]] = field(default_factory=dict)
    exclude_from_train: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def named_sets(self) -> list[tuple[str, list[str]]]:
        """``(directory_name, talk_ids)`` for every dev/test set, dev first."""
        return ([(f"dev.{k}", v) for k, v in self.dev_sets.items()]
                + [(f"test.{k}", v) for k, v in self.test_sets.items()])

    def validate(self):
        owner: dict[str, str] = {}
        for set_name, ids in self.named_sets():
            for talk_id in ids:
                if talk_id in owner and owner[talk_id] != set_name:
                    raise SplitSpecError(
                        f"talk {talk_id} is listed in both {owner[talk_id]} and {set_name}", talk_id)
                owner[talk_id] = set_name

    @classmethod
    def parse(cls, text: str) -> "SplitSpec":
        """Read ``[dev:<name>]``, ``[test:<name>]`` and ``[exclude]`` sections, one talk id per line.

        Blank lines and ``#`` comments are ignored.
        """
        dev, test, exclude = {}, {}, []
        current = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                m = _SECTION.match(line)
                if not m:
                    raise SplitSpecError(f"line {lineno}: unknown section header {line!r}")
                if m.group(3):
                    current = exclude
                else:
                    target = dev if m.group(1) == "dev" else test
                    current = target.setdefault(m.group(2), [])
                continue
            if current is None:
                raise SplitSpecError(f"line {lineno}: talk id {line!r} outside any section", line)
            current.append(line)
        return cls(dev, test, exclude)

    @classmethod
    def load(cls, path: str | Path) -> "SplitSpec":
        return cls.parse(Path(path).read_text(encoding="utf-8"))


def partition(talks: Sequence[str], spec: SplitSpec | None = None) -> dict[str, list[str]]:
    """Assign talks to ``train`` and each named dev/test set.

    Talks in ``exclude_from_train`` never reach train, whether or not they
    appear in a dev/test set.  Set contents keep the input talk order.
    """
    spec = spec or SplitSpec()
    spec.validate()
    if len(set(talks)) != len(talks):
        raise CorpusError("talk ids must be unique")
    available = set(talks)
    result: dict[str, list[str]] = {}
    held_out: set[str] = set()
    for set_name, ids in spec.named_sets():
        wanted = set(ids)
        result[set_name] = [t for t in talks if t in wanted]
        held_out |= wanted & available
    excluded = set(spec.exclude_from_train)
    result["train"] = [t for t in talks if t not in held_out and t not in excluded]
    return result


@dataclass(frozen=True)
class LengthStats:
    mean: float
    std: float
    max: int
    per_mille_over_100: float
    count: int = 0

    def row(self) -> tuple[str, str, str, str]:
        return (f"{self.mean:.1f}", f"{self.std:.1f}", str(self.max), f"{self.per_mille_over_100:.2f}")


@dataclass(frozen=True)
class DiffStats:
    mean: float
    std: float
    count: int = 0

    def row(self) -> tuple[str, str]:
        return (f"{self.mean:.2f}", f"{self.std:.1f}")


def length_stats(sentence_token_counts: Iterable[int]) -> LengthStats:
    """Mean, population standard deviation, max, and per-mille of sentences over 100 tokens."""
    counts = list(sentence_token_counts)
    if not counts:
        raise CorpusError("length_stats needs at least one sentence")
    over = sum(1 for c in counts if c > LONG_SENTENCE)
    return LengthStats(statistics.fmean(counts), statistics.pstdev(counts), max(counts),
                       1000 * over / len(counts), len(counts))


def diff_stats(pairs: Iterable[tuple[int, int]]) -> DiffStats:
    """Statistics of ``a - b`` token differences, population standard deviation."""
    diffs = [a - b for a, b in pairs]
    if not diffs:
        raise CorpusError("diff_stats needs at least one sentence pair")
    return DiffStats(statistics.fmean(diffs), statistics.pstdev(diffs), len(diffs))


def export_bitext(units: Sequence[SentenceUnit], sides: tuple[str, str], sink: str | Path,
                  names: tuple[str, str] | None = None, drop_divergent: bool = False,
                  companion: bool = False) -> tuple[Path, Path]:
    """Write two line-aligned text files (and optionally a TSV of talk ids and flags).

    ``sink`` is a path prefix: files are ``<sink>.<name>`` where names default
    to the side names.  Files are overwritten, never appended to.
    """
    if not units:
        raise CorpusError("nothing to export")
    names = names or sides
    sink = Path(sink)
    kept = [u for u in units if not (drop_divergent and u.divergent)]
    paths = tuple(sink.with_name(f"{sink.name}.{name}") for name in names)
    try:
        sink.parent.mkdir(parents=True, exist_ok=True)
        for path, side in zip(paths, sides):
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                for u in kept:
                    line = u.text(side)
                    if "\n" in line or "\r" in line:
                        raise CorpusError(f"{path}: sentence text contains a line break")
                    fh.write(line + "\n")
        if companion:
            with open(sink.with_name(f"{sink.name}.meta.tsv"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write("talk_id\ttriple_ids\tdivergent\n")
                for u in kept:
                    fh.write(f"{u.talk_id}\t{','.join(map(str, u.source_triple_ids))}\t{int(u.divergent)}\n")
    except OSError as exc:
        raise CorpusError(f"cannot write bitext at {exc.filename or sink}: {exc.strerror}") from exc
    counts = [_line_count(p) for p in paths]
    if counts[0] != counts[1]:
        raise CorpusError(f"exported files have different line counts: {paths[0]}={counts[0]}, {paths[1]}={counts[1]}")
    return paths


def _line_count(path: Path) -> int:
    with open(path, "rb") as fh:
        return sum(1 for _ in fh)


# -- report rendering --

LENGTH_HEADER = ("μ", "σ", "max", "‰>100")
DIFF_HEADER = ("μ", "σ")


def length_table_rows(stats: Mapping[str, Mapping[str, LengthStats]], languages: Sequence[str]) -> list[list[str]]:
    """Rows ``strategy, (μ σ max ‰>100) per language`` in the order given."""
    rows = []
    for strategy, per_lang in stats.items():
        row = [strategy]
        for lang in languages:
            row.extend(per_lang[lang].row())
        rows.append(row)
    return rows


def length_report_tsv(stats: Mapping[str, Mapping[str, LengthStats]], languages: Sequence[str]) -> str:
    lines = ["\t".join(["strategy", "lang", "sentences", *LENGTH_HEADER])]
    for strategy, per_lang in stats.items():
        for lang in languages:
            s = per_lang[lang]
            lines.append("\t".join([strategy, lang, str(s.count), f"{s.mean:.4f}", f"{s.std:.4f}", str(s.max),
                                    f"{s.per_mille_over_100:.4f}"]))
    return "\n".join(lines) + "\n"


def diff_report_tsv(stats: Mapping[str, DiffStats], order: tuple[str, str]) -> str:
    lines = ["\t".join(["strategy", "difference", "pairs", *DIFF_HEADER])]
    for strategy, s in stats.items():
        lines.append("\t".join([strategy, f"{order[0]}-{order[1]}", str(s.count), f"{s.mean:.4f}", f"{s.std:.4f}"]))
    return "\n".join(lines) + "\n"


def render_table(header: Sequence[str], rows: Sequence[Sequence[str]], title: str | None = None) -> str:
    widths = [max(len(str(r[k])) for r in [header, *rows]) for k in range(len(header))]
    fmt = lambda r: "  ".join(str(v).rjust(w) if k else str(v).ljust(w) for k, (v, w) in enumerate(zip(r, widths)))
    out = [title] if title else []
    out += [fmt(header), "  ".join("-" * w for w in widths)]
    out += [fmt(r) for r in rows]
    return "\n".join(out)
