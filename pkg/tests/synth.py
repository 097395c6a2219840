"""Synthetic three-language talks with known caption correspondences.

Pivot sentences are random word sequences.  The two "translations" rewrite
every word with a fixed, length-preserving-ish mapping, so caption lengths
stay comparable across languages.  Each language cuts the same word stream
into captions at its own points: translators sometimes split a pivot caption
in two or merge two neighbouring ones, which is what desynchronizes them.
"""

import random
import string
from dataclasses import dataclass

from pivotcorpus.ingest import build_talk

ENDINGS = ".?!"


def _word(rng):
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(2, 9)))


def translate_a(word):
    return word[::-1] + ("o" if len(word) % 3 == 0 else "")


def translate_b(word):
    w = word[1:] + word[:1]
    return w[:-1] if len(w) > 4 and len(w) % 4 == 0 else w


@dataclass
class SynthTalk:
    talk_id: str
    pivot: object
    a: object
    b: object
    gold: list  # [(pivot_ids, a_ids, b_ids)]
    sentences: list  # word counts of pivot sentences


def _sentence_length(rng, long_rate):
    if rng.random() < long_rate:
        return rng.randint(101, 140)
    return max(3, min(60, int(rng.lognormvariate(2.6, 0.5))))


def _cut(words_per_sentence, rng, lo=3, hi=9):
    """Pivot caption boundaries (word offsets) that never cross a sentence end."""
    cuts, pos = [], 0
    for n in words_per_sentence:
        end = pos + n
        while end - pos > hi:
            pos += rng.randint(lo, hi)
            if end - pos < 2:
                pos = end
                break
            cuts.append(pos)
        pos = end
        cuts.append(pos)
    return cuts


def _retranslate_cuts(cuts, rng, p_split, p_merge, sentence_ends):
    """A translator's caption boundaries derived from the pivot ones."""
    out, prev = [], 0
    for k, cut in enumerate(cuts):
        width = cut - prev
        if width >= 4 and rng.random() < p_split:
            out.append(prev + rng.randint(2, width - 2))
        if cut not in sentence_ends and k + 1 < len(cuts) and rng.random() < p_merge:
            prev = cut
            continue
        out.append(cut)
        prev = cut
    return out


def _captions(words, cuts, punct_at, keep_punct):
    spans, prev = [], 0
    for cut in cuts:
        text = " ".join(words[prev:cut])
        if cut in punct_at and keep_punct(cut):
            text += punct_at[cut]
        spans.append((prev * 400, cut * 400, text))
        prev = cut
    return spans


def _groups(*cut_lists):
    """Gold units: coarsest common refinement of several boundary lists."""
    common = sorted(set.intersection(*(set(c) for c in cut_lists)))
    gold, prev = [], 0
    for end in common:
        ids = []
        for cuts in cut_lists:
            ids.append(tuple(k for k, c in enumerate(cuts) if prev < c <= end))
        gold.append(tuple(ids))
        prev = end
    return gold


def make_talk(seed, talk_id=None, n_sentences=12, punct_free_a=False, punct_free_b=False, drop_rate=0.0,
              p_split=0.08, p_merge=0.05, long_rate=0.0):
    rng = random.Random(seed)
    talk_id = talk_id or f"s{seed}"
    lengths = [_sentence_length(rng, long_rate) for _ in range(n_sentences)]
    words = [_word(rng) for _ in range(sum(lengths))]
    sentence_ends, pos = [], 0
    punct_at = {}
    for n in lengths:
        pos += n
        sentence_ends.append(pos)
        punct_at[pos] = rng.choice(ENDINGS)
    ends = set(sentence_ends)
    # a comma now and then inside sentences, never strong
    commas = {c: "," for c in range(1, pos) if c not in ends and rng.random() < 0.05}
    pivot_cuts = _cut(lengths, rng)
    a_cuts = _retranslate_cuts(pivot_cuts, rng, p_split, p_merge, ends)
    b_cuts = _retranslate_cuts(pivot_cuts, rng, p_split, p_merge, ends)
    marks = {**commas, **punct_at}
    drops_a = {c for c in sentence_ends if rng.random() < drop_rate}
    drops_b = {c for c in sentence_ends if rng.random() < drop_rate}

    pivot_words = [w.capitalize() if k == 0 or k in ends else w for k, w in enumerate(words)]
    pivot = _captions(pivot_words, pivot_cuts, marks, lambda c: True)
    a = _captions([translate_a(w) for w in words], a_cuts, marks,
                  lambda c: not punct_free_a and (c not in ends or c not in drops_a))
    b = _captions([translate_b(w) for w in words], b_cuts, marks,
                  lambda c: not punct_free_b and (c not in ends or c not in drops_b))
    gold = _groups(pivot_cuts, a_cuts, b_cuts)
    return SynthTalk(
        talk_id,
        build_talk(talk_id, "en", pivot),
        build_talk(talk_id, "xa", a),
        build_talk(talk_id, "xb", b),
        gold,
        lengths,
    )
