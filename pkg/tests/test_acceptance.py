"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line; conftest prints the collected
lines at the end of the run.  ``python tests/test_acceptance.py`` runs the
same checks without pytest.
"""

import math
import random
import time
from collections import Counter

import corpus_data as cd
import oracles
from pivotcorpus.aligner import AlignmentError, align, compose, identity_map, invert
from pivotcorpus.cli import main
from pivotcorpus.corpus import diff_stats, length_stats
from pivotcorpus.ingest import build_talk
from pivotcorpus.pivot import AlignedTriple, aggregate, format_rate, pivot_align
from pivotcorpus.rebuild import RebuildStrategy, rebuild
from pivotcorpus.textproc import tokenize
from synth import make_talk

RESULTS = []

STRATEGIES = [RebuildStrategy.none(), RebuildStrategy.pivot(),
              RebuildStrategy.strong_punct("a"), RebuildStrategy.strong_punct("b")]


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def segs(lengths):
    return ["x" * n for n in lengths]


def test_01_oracle_equivalence():
    rng = random.Random(2024)
    instances, mismatches = 1000, 0
    start = time.perf_counter()
    for _ in range(instances):
        src = [rng.randint(1, 120) for _ in range(rng.randint(1, 8))]
        tgt = [rng.randint(1, 120) for _ in range(rng.randint(1, 8))]
        best, _ = oracles.enumerate_min(src, tgt)
        got = align(segs(src), segs(tgt)).total_cost
        if not math.isclose(got, best, rel_tol=1e-9, abs_tol=1e-9):
            mismatches += 1
    elapsed = time.perf_counter() - start
    record(1, "aligner matches exhaustive enumeration", mismatches == 0 and elapsed < 60,
           f"{instances - mismatches}/{instances} instances equal, {elapsed:.1f}s (< 60s)")


def test_02_map_invariants():
    rng = random.Random(7)
    checked = violations = 0
    for _ in range(400):
        lens = [[rng.randint(1, 90) for _ in range(rng.randint(1, 10))] for _ in range(3)]
        ab = align(segs(lens[0]), segs(lens[1]))
        bc = align(segs(lens[1]), segs(lens[2]))
        for m, n_src, n_tgt in ((ab, len(lens[0]), len(lens[1])), (bc, len(lens[1]), len(lens[2])),
                                (invert(ab), len(lens[1]), len(lens[0])),
                                (compose(ab, bc), len(lens[0]), len(lens[2])),
                                (compose(invert(ab), ab), len(lens[1]), len(lens[1]))):
            checked += 1
            problems = oracles.check_map(m.spans(), n_src, n_tgt)
            try:
                m.validate()
            except AlignmentError as exc:
                problems.append(str(exc))
            violations += bool(problems)
    record(2, "alignment map invariants", violations == 0,
           f"{violations} violations in {checked} align/compose/invert outputs")


def test_03_pivot_identity():
    talks = bad = 0
    for seed in range(100):
        t = make_talk(seed, n_sentences=6)
        result = pivot_align(t.pivot, t.a, t.pivot, t.b)
        talks += 1
        if (result.map_pp.spans() != identity_map(len(t.pivot)).spans()
                or result.report.unit_rate != 0 or result.report.word_rate != 0):
            bad += 1
    record(3, "identical pivots give identity map and zero rates", bad == 0,
           f"{talks - bad}/{talks} talks")


def test_04_golden_1443():
    triples = [AlignedTriple(en, ar, he, (k,), (k,), (k,)) for k, (en, ar, he) in enumerate(cd.GOLDEN_1443_UNITS)]
    pivot = [u.pivot_text for u in rebuild(triples, RebuildStrategy.pivot())]
    strong = rebuild(triples, RebuildStrategy.strong_punct("b"))
    none = rebuild(triples, RebuildStrategy.none())
    ok = (pivot == cd.GOLDEN_1443_PIVOT and len(strong) == 1
          and [(u.pivot_text, u.a_text, u.b_text) for u in none] == cd.GOLDEN_1443_UNITS)
    record(4, "talk 1443 golden sentences", ok,
           f"pivot {len(pivot)} exact sentences, strngP(he) {len(strong)}, none {len(none)} units")


def test_05_golden_2357():
    en_ar, en_he, ar, he = cd.collections()
    triples, _ = pivot_align(en_ar["2357"], ar["2357"], en_he["2357"], he["2357"])
    unit = next(t for t in triples if 1 in t.pivot_caption_ids)
    caps = ar["2357"].captions
    spans = [(caps[i].start_ms, caps[i].end_ms) for i in unit.a_caption_ids]
    ok = unit.pivot_caption_ids == (1,) and spans == [(53851, 56091), (56091, 59091)]
    record(5, "talk 2357 one-to-two caption unit", ok,
           f"pivot {unit.pivot_caption_ids} <-> ar {unit.a_caption_ids} at {spans}")


def test_06_token_conservation():
    talks = broken = 0
    for seed in range(100):
        t = make_talk(500 + seed, n_sentences=6, punct_free_b=seed % 3 == 0, drop_rate=0.2)
        triples, _ = pivot_align(t.pivot, t.a, t.pivot, t.b)
        talks += 1
        for strategy in STRATEGIES:
            units = rebuild(triples, strategy)
            for side in ("pivot", "a", "b"):
                before = Counter(tok for x in triples for tok in tokenize(x.text(side)))
                after = Counter(tok for x in units for tok in tokenize(x.text(side)))
                broken += before != after
    record(6, "token multisets preserved by every strategy", broken == 0,
           f"{broken} mismatches over {talks} talks x {len(STRATEGIES)} strategies x 3 streams")


def test_07_table4_direction():
    counts = {"pivot": [], "strngP": []}
    for k in range(200):
        free = k % 10 < 3
        t = make_talk(1000 + k, punct_free_a=free, punct_free_b=free, long_rate=0.004)
        triples, _ = pivot_align(t.pivot, t.a, t.pivot, t.b)
        for name, strategy in (("pivot", RebuildStrategy.pivot()), ("strngP", RebuildStrategy.strong_punct("a"))):
            counts[name] += [len(tokenize(u.a_text)) for u in rebuild(triples, strategy)]
    p, s = length_stats(counts["pivot"]), length_stats(counts["strngP"])
    ok = s.std > p.std and s.per_mille_over_100 >= 4 * p.per_mille_over_100
    record(7, "strngP longer-tailed than pivot on punctuation-starved corpus", ok,
           f"σ {s.std:.1f} > {p.std:.1f}, ‰>100 {s.per_mille_over_100:.2f} >= 4 x {p.per_mille_over_100:.2f}")


def test_08_statistics():
    ls = length_stats([2, 4])
    ds = diff_stats([(5, 3), (3, 5)])
    got = ((ls.mean, ls.std, ls.max, ls.per_mille_over_100), (ds.mean, ds.std))
    record(8, "statistics hand values", got == ((3, 1, 4, 0), (0, 2)), f"length {got[0]}, diff {got[1]}")


def test_09_determinism(tmp_path):
    from conftest import write_fixture_corpus

    flags = write_fixture_corpus(tmp_path / "in")
    trees = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        code = main(["pipeline", "--pivot-lang", "en", "--langs", "ar,he", "--out", str(out), *flags,
                     "--strategy", "none", "--strategy", "strong-punct:he", "--strategy", "pivot"])
        assert code == 0
        trees.append({p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    record(9, "pipeline runs byte-identical", trees[0] == trees[1] and len(trees[0]) > 0,
           f"{len(trees[0])} files compared")


def test_10_divergence_arithmetic():
    reports = []
    for k in range(5):
        spans = [(i * 1000, i * 1000 + 900, f"Talk {k} caption {i} says something.") for i in range(100)]
        edited = [(s, e, text[:-1] + "!" if (k, i) in {(1, 17), (3, 60)} else text)
                  for i, (s, e, text) in enumerate(spans)]
        pivot_a, pivot_b = build_talk(str(k), "en", spans), build_talk(str(k), "en", edited)
        reports.append(pivot_align(pivot_a, pivot_a, pivot_b, pivot_b).report)
    total = aggregate(reports)
    ok = (total.differing_units, total.total_units) == (2, 500) and total.unit_rate == 0.004 \
        and format_rate(total.unit_rate) == "0.4%"
    record(10, "divergence report arithmetic", ok,
           f"{total.differing_units} of {total.total_units} -> {total.unit_rate} rendered {format_rate(total.unit_rate)}")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    failed = 0
    for name, fn in sorted((n, f) for n, f in globals().items() if n.startswith("test_")):
        try:
            if name == "test_09_determinism":
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
