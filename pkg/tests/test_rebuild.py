import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

import corpus_data as cd
from pivotcorpus.pivot import AlignedTriple, pivot_align
from pivotcorpus.rebuild import (
    PunctProfile,
    RebuildError,
    RebuildStrategy,
    SentenceUnit,
    is_strong_terminal,
    rebuild,
    units_from_tsv,
    units_to_tsv,
)
from pivotcorpus.textproc import tokenize
from synth import make_talk

STRATEGIES = [RebuildStrategy.none(), RebuildStrategy.pivot(),
              RebuildStrategy.strong_punct("a"), RebuildStrategy.strong_punct("b")]


def golden_triples():
    return [AlignedTriple(en, ar, he, (k,), (k,), (k,)) for k, (en, ar, he) in enumerate(cd.GOLDEN_1443_UNITS)]


class TestGolden:
    def test_none(self):
        units = rebuild(golden_triples(), RebuildStrategy.none())
        assert [(u.pivot_text, u.a_text, u.b_text) for u in units] == cd.GOLDEN_1443_UNITS

    def test_pivot(self):
        units = rebuild(golden_triples(), RebuildStrategy.pivot())
        assert [u.pivot_text for u in units] == cd.GOLDEN_1443_PIVOT
        assert [u.source_triple_ids for u in units] == [(0,), (1, 2), (3, 4)]

    def test_strong_punct_hebrew(self):
        units = rebuild(golden_triples(), RebuildStrategy.strong_punct("b"))
        assert len(units) == 1
        assert units[0].pivot_text == " ".join(cd.GOLDEN_1443_PIVOT)

    def test_through_pivot_alignment(self):
        en_ar, en_he, ar, he = cd.collections()
        triples, _ = pivot_align(en_ar["1443"], ar["1443"], en_he["1443"], he["1443"])
        assert [u.pivot_text for u in rebuild(triples, RebuildStrategy.pivot())] == cd.GOLDEN_1443_PIVOT
        assert len(rebuild(triples, RebuildStrategy.strong_punct("b"))) == 1
        assert len(rebuild(triples, RebuildStrategy.none())) == len(triples) == 4


class TestStrongTerminal:
    @pytest.mark.parametrize("text,expected", [
        ("made out of.", True),
        ("the color of the door,", False),
        ('He said "stop."', True),
        ("ماذا؟", True),
        ("Wait…", True),
        ("one; two;", False),
        ("", False),
        ("(really?)  ", True),
    ])
    def test_examples(self, text, expected):
        assert is_strong_terminal(text) is expected

    def test_closers_configurable(self):
        only_quote = PunctProfile(closers=frozenset('"'))
        assert is_strong_terminal('He said "stop."', only_quote)
        assert not is_strong_terminal("(stop.)", only_quote)

    def test_profile_file(self, tmp_path):
        path = tmp_path / "punct.json"
        path.write_text(json.dumps({"strong": [46, "U+061F", ";"], "closers": ['"']}))
        profile = PunctProfile.load(path)
        assert profile.strong == frozenset(".؟;")
        assert is_strong_terminal("a;", profile)
        assert PunctProfile.from_dict(profile.to_dict()) == profile

    def test_profile_errors(self):
        with pytest.raises(RebuildError):
            PunctProfile.from_dict({"strong": ["."]})
        with pytest.raises(RebuildError):
            PunctProfile.from_dict({"strong": ["ab"], "closers": []})


class TestStrategy:
    def test_parse(self):
        assert RebuildStrategy.parse("pivot") == RebuildStrategy.pivot()
        assert RebuildStrategy.parse("strong-punct:he", {"he": "b"}) == RebuildStrategy.strong_punct("b")
        assert RebuildStrategy.parse("strngP:a").name == "strong-punct:a"

    @pytest.mark.parametrize("text", ["sentences", "strong-punct:fr", "pivot:a"])
    def test_parse_errors(self, text):
        with pytest.raises(RebuildError):
            RebuildStrategy.parse(text)

    def test_trailing_open_group(self):
        triples = [AlignedTriple("One.", "x", "y", (0,)), AlignedTriple("two", "x", "y", (1,))]
        units = rebuild(triples, RebuildStrategy.pivot())
        assert [u.source_triple_ids for u in units] == [(0,), (1,)]

    def test_divergence_propagates(self):
        triples = [AlignedTriple("a", "", "", (0,)), AlignedTriple("b.", "", "", (1,), divergent=True)]
        assert rebuild(triples, RebuildStrategy.pivot())[0].divergent

    def test_empty_input(self):
        assert rebuild([], RebuildStrategy.pivot()) == []

    def test_unit_ids_consecutive(self):
        with pytest.raises(RebuildError):
            SentenceUnit("a", "b", "c", (0, 2))


def stream_tokens(items, side):
    return Counter(tok for it in items for tok in tokenize(it.text(side)))


@pytest.mark.parametrize("strategy", STRATEGIES, ids=lambda s: s.name)
@pytest.mark.parametrize("seed", range(6))
def test_token_conservation(strategy, seed):
    t = make_talk(seed, punct_free_b=seed % 2 == 0, drop_rate=0.2)
    triples, _ = pivot_align(t.pivot, t.a, t.pivot, t.b)
    units = rebuild(triples, strategy)
    for side in ("pivot", "a", "b"):
        assert stream_tokens(units, side) == stream_tokens(triples, side)
    assert [k for u in units for k in u.source_triple_ids] == list(range(len(triples)))


words = st.text(alphabet="ab.,!? ", max_size=12)


@given(st.lists(st.tuples(words, words, words), min_size=1, max_size=10),
       st.sampled_from(STRATEGIES))
def test_token_conservation_property(rows, strategy):
    triples = [AlignedTriple(p, a, b, (k,)) for k, (p, a, b) in enumerate(rows)]
    units = rebuild(triples, strategy)
    for side in ("pivot", "a", "b"):
        assert stream_tokens(units, side) == stream_tokens(triples, side)


def test_tsv_round_trip():
    units = rebuild(golden_triples(), RebuildStrategy.pivot(), talk_id="1443")
    back = units_from_tsv(units_to_tsv(units))
    assert back == units
    assert {u.talk_id for u in back} == {"1443"}
