"""Command line pipeline: align -> rebuild -> stats / partition.

Every stage reads and writes plain files under ``--out``::

    align/<talk_id>.tsv          triple dumps
    align/divergence.tsv         per-talk and total pivot divergence
    align/run.json               languages of the run
    rebuild/<strategy>/<talk_id>.tsv
    stats/length.tsv, stats/diff.tsv
    corpus/<set>/<set>.<lang>    line-aligned bitext, plus corpus/manifest.tsv
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .aligner import AlignerParams, AlignmentError
from .corpus import (DIFF_HEADER, LENGTH_HEADER, CorpusError, SplitSpec, SplitSpecError, diff_report_tsv,
                     diff_stats, export_bitext, length_report_tsv, length_stats, length_table_rows, partition,
                     render_table)
from .ingest import IngestError, Talk, TalkCollection, parse_collection_xml, parse_srt, parse_vtt, sort_talk_ids
from .pivot import DivergenceReport, PivotError, aggregate, format_rate, pivot_align, triples_from_tsv, triples_to_tsv
from .rebuild import PunctProfile, RebuildError, RebuildStrategy, rebuild, units_from_tsv, units_to_tsv
from .textproc import profile_for_language, tokenize

log = logging.getLogger("pivotcorpus")

EXIT_OK, EXIT_INPUT, EXIT_EMPTY = 0, 2, 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        self.code = code
        super().__init__(message)


@dataclass
class PipelineConfig:
    pivot_lang: str
    lang_a: str
    lang_b: str
    inputs: dict = field(default_factory=dict)  # stream key -> path; keys: "en:ar", "en:he", "ar", "he"
    strategies: list = field(default_factory=lambda: [RebuildStrategy.pivot()])
    punct: PunctProfile = field(default_factory=PunctProfile)
    split: SplitSpec | None = None
    params: AlignerParams = field(default_factory=AlignerParams)
    out: Path = Path("out")
    drop_divergent: bool = False
    fmt: str = "xml"
    jobs: int = 1

    def __post_init__(self):
        langs = (self.pivot_lang, self.lang_a, self.lang_b)
        if len(set(langs)) != 3:
            raise CliError(f"pivot and target languages must be distinct, got {', '.join(langs)}")

    @property
    def side_aliases(self) -> dict:
        return {self.pivot_lang: "pivot", self.lang_a: "a", self.lang_b: "b"}

    def lang_of(self, side: str) -> str:
        return {"pivot": self.pivot_lang, "a": self.lang_a, "b": self.lang_b}[side]

    def strategy_dir(self, strategy: RebuildStrategy) -> str:
        if strategy.kind == "strong-punct":
            return f"strong-punct-{self.lang_of(strategy.side)}"
        return strategy.kind

    def strategy_label(self, strategy: RebuildStrategy) -> str:
        return {"none": "none", "pivot": "pivot"}.get(strategy.kind, f"strngP({self.lang_of(strategy.side or 'a')})")


# -- input loading --

def _load_collection(path: Path, fmt: str, language: str) -> TalkCollection:
    if not path.exists():
        raise CliError(f"input not found: {path}")
    if fmt == "xml":
        if path.is_dir():
            raise CliError(f"expected a collection XML file, got a directory: {path}")
        coll = parse_collection_xml(path.read_bytes())
        return coll
    ext = "." + fmt
    if not path.is_dir():
        raise CliError(f"--format {fmt} expects a directory of <talk_id>{ext} files: {path}")
    parser = parse_srt if fmt == "srt" else parse_vtt
    talks = {}
    for file in sorted(path.glob(f"*{ext}")):
        talks[file.stem] = parser(file.read_bytes(), talk_id=file.stem, language=language)
    return TalkCollection(language, talks)


def _stream_path(cfg: PipelineConfig, key: str) -> Path:
    if key in cfg.inputs:
        return Path(cfg.inputs[key])
    # a pivot stream paired with one language falls back to the shared pivot input
    shared = key.split(":")[0]
    if shared in cfg.inputs:
        return Path(cfg.inputs[shared])
    raise CliError(f"no input given for {key} (use --input {key}=PATH)")


def _align_one(job):
    talk_id, talks, params = job
    try:
        result = pivot_align(*talks, params)
    except (AlignmentError, PivotError, ValueError) as exc:
        return talk_id, None, None, str(exc)
    return talk_id, result.triples, result.report, None


def _reset_dir(path: Path) -> Path:
    if path.exists():
        shutil.rmtree(path)
    path.mkdir(parents=True)
    return path


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")


# -- subcommands --

def cmd_align(cfg: PipelineConfig) -> int:
    keys = [f"{cfg.pivot_lang}:{cfg.lang_a}", cfg.lang_a, f"{cfg.pivot_lang}:{cfg.lang_b}", cfg.lang_b]
    paths = [_stream_path(cfg, k) for k in keys]
    for p in paths:
        if not p.exists():
            raise CliError(f"input not found: {p}")
    cache: dict[Path, TalkCollection] = {}
    langs = [cfg.pivot_lang, cfg.lang_a, cfg.pivot_lang, cfg.lang_b]
    colls = []
    for path, lang in zip(paths, langs):
        if path not in cache:
            cache[path] = _load_collection(path, cfg.fmt, lang)
        colls.append(cache[path])
    common = set(colls[0].talks)
    for c in colls[1:]:
        common &= set(c.talks)
    talk_ids = sort_talk_ids(common)
    if not talk_ids:
        raise CliError("no talk is common to all input streams", EXIT_EMPTY)
    log.info("aligning %d talks common to %s, %s and %s", len(talk_ids), cfg.pivot_lang, cfg.lang_a, cfg.lang_b)

    jobs = [(tid, tuple(c[tid] for c in colls), cfg.params) for tid in talk_ids]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_align_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.jobs))))
    else:
        results = [_align_one(j) for j in jobs]

    out = _reset_dir(cfg.out / "align")
    reports: list[tuple[str, DivergenceReport]] = []
    for talk_id, triples, report, error in results:
        if error is not None:
            log.warning("talk %s skipped: %s", talk_id, error)
            continue
        _write(out / f"{talk_id}.tsv", triples_to_tsv((talk_id, t) for t in triples))
        reports.append((talk_id, report))
    if not reports:
        raise CliError("every talk failed to align", EXIT_EMPTY)

    total = aggregate(r for _, r in reports)
    lines = ["talk_id\tunits\tdiffering_units\twords\tdiffering_words\tunit_rate\tword_rate"]
    for talk_id, r in reports + [("TOTAL", total)]:
        lines.append(f"{talk_id}\t{r.total_units}\t{r.differing_units}\t{r.total_words}\t{r.differing_words}"
                     f"\t{r.unit_rate:.6f}\t{r.word_rate:.6f}")
    _write(out / "divergence.tsv", "\n".join(lines) + "\n")
    run = {"pivot_lang": cfg.pivot_lang, "lang_a": cfg.lang_a, "lang_b": cfg.lang_b,
           "talks": [tid for tid, _ in reports]}
    _write(out / "run.json", json.dumps(run, indent=2, sort_keys=True) + "\n")
    print(f"aligned {len(reports)}/{len(talk_ids)} talks; pivot self-alignment: {total.summary()}")
    flagged = [tid for tid, r in reports if r.differing_units]
    if flagged:
        print(f"talks with pivot divergence: {', '.join(flagged)}")
    return EXIT_OK


def _aligned_talks(cfg: PipelineConfig) -> list[str]:
    run_file = cfg.out / "align" / "run.json"
    if not run_file.exists():
        raise CliError(f"align output not found: {run_file} (run the align stage first)")
    return json.loads(run_file.read_text(encoding="utf-8"))["talks"]


def cmd_rebuild(cfg: PipelineConfig) -> int:
    talks = _aligned_talks(cfg)
    align_dir = cfg.out / "align"
    triples = {}
    for talk_id in talks:
        path = align_dir / f"{talk_id}.tsv"
        if not path.exists():
            raise CliError(f"align output not found: {path}")
        triples[talk_id] = [t for _, t in triples_from_tsv(path.read_text(encoding="utf-8"))]
    for strategy in cfg.strategies:
        out = _reset_dir(cfg.out / "rebuild" / cfg.strategy_dir(strategy))
        n_sent = n_trip = 0
        for talk_id in talks:
            units = rebuild(triples[talk_id], strategy, cfg.punct, talk_id=talk_id)
            _write(out / f"{talk_id}.tsv", units_to_tsv(units))
            n_sent += len(units)
            n_trip += len(triples[talk_id])
        print(f"{cfg.strategy_label(strategy)}: {n_sent} sentences from {n_trip} aligned units in {len(talks)} talks")
    return EXIT_OK


def _load_units(cfg: PipelineConfig, strategy: RebuildStrategy, talks: list[str]) -> dict:
    folder = cfg.out / "rebuild" / cfg.strategy_dir(strategy)
    units = {}
    for talk_id in talks:
        path = folder / f"{talk_id}.tsv"
        if not path.exists():
            raise CliError(f"rebuilt sentences not found: {path} (run the rebuild stage first)")
        units[talk_id] = units_from_tsv(path.read_text(encoding="utf-8"))
    return units


def _partition(cfg: PipelineConfig, talks: list[str]) -> dict[str, list[str]]:
    try:
        return partition(talks, cfg.split or SplitSpec())
    except SplitSpecError as exc:
        raise CliError(f"invalid split spec: {exc}") from exc


def cmd_stats(cfg: PipelineConfig) -> int:
    talks = _aligned_talks(cfg)
    train = _partition(cfg, talks)["train"]
    langs = [cfg.lang_a, cfg.lang_b]
    profiles = {lang: profile_for_language(lang) for lang in langs}
    length: dict[str, dict] = {}
    diffs: dict[str, object] = {}
    for strategy in cfg.strategies:
        units = _load_units(cfg, strategy, train)
        flat = [u for tid in train for u in units[tid] if not (cfg.drop_divergent and u.divergent)]
        counts_a = [len(tokenize(u.a_text, profiles[cfg.lang_a])) for u in flat]
        counts_b = [len(tokenize(u.b_text, profiles[cfg.lang_b])) for u in flat]
        if not flat:
            raise CliError("no train sentences to measure", EXIT_EMPTY)
        label = cfg.strategy_label(strategy)
        length[label] = {cfg.lang_a: length_stats(counts_a), cfg.lang_b: length_stats(counts_b)}
        diffs[label] = diff_stats(zip(counts_a, counts_b))
    out = _reset_dir(cfg.out / "stats")
    _write(out / "length.tsv", length_report_tsv(length, langs))
    _write(out / "diff.tsv", diff_report_tsv(diffs, (cfg.lang_a, cfg.lang_b)))
    header = ["train rebuild."] + [f"{lang} {h}" for lang in langs for h in LENGTH_HEADER]
    print(render_table(header, length_table_rows(length, langs), "Sentence length (tokens)"))
    print()
    print(render_table(["train rebuild.", *DIFF_HEADER], [[k, *v.row()] for k, v in diffs.items()],
                       f"Length difference {cfg.lang_a}-{cfg.lang_b} (tokens)"))
    return EXIT_OK


def cmd_partition(cfg: PipelineConfig) -> int:
    talks = _aligned_talks(cfg)
    sets = _partition(cfg, talks)
    strategy = cfg.strategies[0]
    units = _load_units(cfg, strategy, talks)
    out = _reset_dir(cfg.out / "corpus")
    manifest = ["set\ttalks\tsentences\ttalk_ids"]
    order = ["train"] + [name for name in sets if name != "train"]
    for name in order:
        ids = sets[name]
        set_units = [u for tid in ids for u in units[tid]]
        kept = [u for u in set_units if not (cfg.drop_divergent and u.divergent)]
        if kept:
            export_bitext(set_units, ("a", "b"), out / name / name, names=(cfg.lang_a, cfg.lang_b),
                          drop_divergent=cfg.drop_divergent, companion=True)
        manifest.append(f"{name}\t{len(ids)}\t{len(kept)}\t{','.join(ids)}")
    _write(out / "manifest.tsv", "\n".join(manifest) + "\n")
    excluded = len(talks) - sum(len(v) for v in sets.values())
    print(f"partitioned {len(talks)} talks with {cfg.strategy_label(strategy)} sentences: "
          + ", ".join(f"{k}={len(sets[k])}" for k in order) + f", excluded={excluded}")
    return EXIT_OK


def cmd_pipeline(cfg: PipelineConfig) -> int:
    for stage in (cmd_align, cmd_rebuild, cmd_stats, cmd_partition):
        code = stage(cfg)
        if code != EXIT_OK:
            return code
    return EXIT_OK


COMMANDS = {"align": cmd_align, "rebuild": cmd_rebuild, "stats": cmd_stats, "partition": cmd_partition,
            "pipeline": cmd_pipeline}


# -- argument parsing --

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--pivot-lang", help="pivot language code (default: en, or the one recorded by align)")
    p.add_argument("--langs", help="the two synchronized languages, e.g. ar,he")
    p.add_argument("--input", action="append", default=[], metavar="STREAM=PATH",
                   help="input per stream: LANG=PATH, or PIVOT:LANG=PATH for the pivot stream paired with LANG")
    p.add_argument("--format", dest="fmt", choices=("xml", "srt", "vtt"), default="xml",
                   help="input format; srt/vtt inputs are directories of <talk_id>.<ext> files")
    p.add_argument("--strategy", action="append", default=[],
                   help="none, strong-punct:<side> or pivot; repeatable (default: pivot)")
    p.add_argument("--punct", type=Path, help="JSON punctuation profile with 'strong' and 'closers' lists")
    p.add_argument("--split", type=Path, help="split spec with [dev:<name>], [test:<name>], [exclude] sections")
    p.add_argument("--drop-divergent", action="store_true", help="drop units flagged by the pivot check")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for alignment")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--band-width", type=int, help="restrict the alignment search to a diagonal band")
    p.add_argument("--lexical-weight", type=float, default=0.5, help="token overlap weight of the lexical pass")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="pivotcorpus",
                                     description="Pivot-based subtitle alignment and sentence rebuilding.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"align": "synchronize the two languages through the pivot",
             "rebuild": "rebuild sentences from aligned units",
             "stats": "sentence length statistics of the train talks",
             "partition": "split talks into train/dev/test bitexts",
             "pipeline": "run align, rebuild, stats and partition"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _parse_inputs(entries) -> dict:
    inputs = {}
    for entry in entries:
        key, sep, path = entry.partition("=")
        if not sep or not key or not path:
            raise CliError(f"--input expects STREAM=PATH, got {entry!r}")
        inputs[key] = path
    return inputs


def config_from_args(args) -> PipelineConfig:
    recorded = {}
    run_file = args.out / "align" / "run.json"
    if args.command != "align" and args.command != "pipeline" and run_file.exists():
        recorded = json.loads(run_file.read_text(encoding="utf-8"))
    pivot = args.pivot_lang or recorded.get("pivot_lang", "en")
    if args.langs:
        langs = [x.strip() for x in args.langs.split(",") if x.strip()]
        if len(langs) != 2:
            raise CliError(f"--langs expects two comma-separated codes, got {args.langs!r}")
    elif recorded:
        langs = [recorded["lang_a"], recorded["lang_b"]]
    else:
        raise CliError("--langs is required (e.g. --langs ar,he)")
    if args.jobs < 1:
        raise CliError("--jobs must be >= 1")
    cfg = PipelineConfig(pivot, langs[0], langs[1], inputs=_parse_inputs(args.input), out=args.out,
                         drop_divergent=args.drop_divergent, fmt=args.fmt, jobs=args.jobs)
    try:
        cfg.strategies = [RebuildStrategy.parse(s, cfg.side_aliases) for s in args.strategy] or [RebuildStrategy.pivot()]
        cfg.params = AlignerParams(lexical_weight=args.lexical_weight, band_width=args.band_width)
    except (RebuildError, AlignmentError) as exc:
        raise CliError(str(exc)) from exc
    for path_arg in (args.punct, args.split):
        if path_arg is not None and not path_arg.exists():
            raise CliError(f"input not found: {path_arg}")
    if args.punct:
        cfg.punct = PunctProfile.load(args.punct)
    if args.split:
        cfg.split = SplitSpec.load(args.split)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"pivotcorpus: error: {exc}", file=sys.stderr)
        return exc.code
    except SplitSpecError as exc:
        print(f"pivotcorpus: error: invalid split spec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IngestError, RebuildError, CorpusError, json.JSONDecodeError) as exc:
        print(f"pivotcorpus: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
