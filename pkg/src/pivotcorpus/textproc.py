"""Tokenization and normalization profiles.

Three profiles are registered by name: ``default`` (Latin-script rules),
``arabic`` (orthographic normalization, then default tokenization) and
``hebrew`` (default rules, with geresh/gershayim kept attached to words).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Callable, Iterable

TATWEEL = "ـ"
# fathatan .. sukun, plus superscript alef
ARABIC_DIACRITICS = frozenset(chr(cp) for cp in range(0x064B, 0x0653)) | {"ٰ"}
ALEF_VARIANTS = "أإآٱ"  # أ إ آ ٱ
ALEF = "ا"
ALEF_MAQSURA = "ى"
YA = "ي"
TA_MARBUTA = "ة"
HA = "ه"
GERESH = "׳"
GERSHAYIM = "״"

_DROP_TATWEEL = str.maketrans({TATWEEL: None})
_DROP_DIACRITICS = str.maketrans({c: None for c in ARABIC_DIACRITICS})
_ALEF_MAP = str.maketrans({c: ALEF for c in ALEF_VARIANTS})
_MAQSURA_MAP = str.maketrans({ALEF_MAQSURA: YA})
_TA_MARBUTA_MAP = str.maketrans({TA_MARBUTA: HA})

NORMALIZE_RULES: dict[str, Callable[[str], str]] = {
    "remove_tatweel": lambda s: s.translate(_DROP_TATWEEL),
    "remove_diacritics": lambda s: s.translate(_DROP_DIACRITICS),
    "normalize_alef": lambda s: s.translate(_ALEF_MAP),
    "alef_maqsura_to_ya": lambda s: s.translate(_MAQSURA_MAP),
    "ta_marbuta_to_ha": lambda s: s.translate(_TA_MARBUTA_MAP),
}

ARABIC_RULES = ("remove_tatweel", "remove_diacritics", "normalize_alef", "alef_maqsura_to_ya")

TOKENIZERS = ("default", "hebrew")


@dataclass(frozen=True)
class LangProfile:
    language: str
    normalize_rules: tuple[str, ...] = ()
    tokenizer: str = "default"

    def __post_init__(self):
        unknown = [r for r in self.normalize_rules if r not in NORMALIZE_RULES]
        if unknown:
            raise ValueError(f"unknown normalization rule(s): {', '.join(unknown)}")
        if self.tokenizer not in TOKENIZERS:
            raise ValueError(f"unknown tokenizer rule set {self.tokenizer!r}")

    def normalize(self, text: str) -> str:
        for rule in self.normalize_rules:
            text = NORMALIZE_RULES[rule](text)
        return text


PROFILES = {
    "default": LangProfile("und"),
    "arabic": LangProfile("ar", ARABIC_RULES),
    "hebrew": LangProfile("he", tokenizer="hebrew"),
}

_LANGUAGE_PROFILES = {"ar": "arabic", "he": "hebrew", "iw": "hebrew"}


def get_profile(name: str) -> LangProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"no profile named {name!r}; known: {', '.join(sorted(PROFILES))}") from None


def profile_for_language(language: str) -> LangProfile:
    """Registry profile for a language code, falling back to ``default``."""
    return PROFILES[_LANGUAGE_PROFILES.get(language.split("-")[0].lower(), "default")]


def normalize_arabic(text: str, ta_marbuta_to_ha: bool = False) -> str:
    """Tatweel and diacritics removal, alef and alef maqsura unification.

    ؤ is left alone; ة → ه only when asked.  Idempotent, and characters
    outside the handled Arabic code points pass through unchanged.
    """
    for rule in ARABIC_RULES:
        text = NORMALIZE_RULES[rule](text)
    if ta_marbuta_to_ha:
        text = NORMALIZE_RULES["ta_marbuta_to_ha"](text)
    return text


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def _split_chunk(chunk: str, tokenizer: str) -> list[str]:
    lead = []
    start, end = 0, len(chunk)
    while start < end and _is_punct(chunk[start]):
        lead.append(chunk[start])
        start += 1
    trail = []
    while end > start and _is_punct(chunk[end - 1]):
        if tokenizer == "hebrew" and chunk[end - 1] in (GERESH, GERSHAYIM) and end - 1 > start:
            break
        trail.append(chunk[end - 1])
        end -= 1
    core = [chunk[start:end]] if end > start else []
    return lead + core + trail[::-1]


def tokenize(text: str, profile: LangProfile | str = "default") -> list[str]:
    """Whitespace split, then peel punctuation and symbols off both ends of each chunk.

    Word-internal characters are never split, which keeps ``it's``, ``3.5``
    and ``1,000`` whole.
    """
    if isinstance(profile, str):
        profile = get_profile(profile)
    text = profile.normalize(text)
    tokens = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk, profile.tokenizer))
    return tokens


def count_tokens(sentences: Iterable[str], profile: LangProfile | str = "default") -> int:
    return sum(len(tokenize(s, profile)) for s in sentences)
