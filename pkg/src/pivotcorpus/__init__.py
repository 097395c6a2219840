"""Pivot-language subtitle alignment, sentence rebuilding and corpus statistics."""

__version__ = "0.1.0"

from .aligner import AlignerParams, AlignmentMap, Bead, align, compose, identity_map, invert, length_cost, lexical_refine
from .corpus import DiffStats, LengthStats, SplitSpec, diff_stats, export_bitext, length_stats, partition
from .ingest import Caption, Talk, TalkCollection, intersect_collections, parse_collection_xml, parse_srt, parse_vtt
from .pivot import AlignedTriple, DivergenceReport, measure_divergence, pivot_align
from .rebuild import PunctProfile, RebuildStrategy, SentenceUnit, is_strong_terminal, rebuild
from .textproc import LangProfile, count_tokens, get_profile, normalize_arabic, tokenize

__all__ = [
    "AlignedTriple", "AlignerParams", "AlignmentMap", "Bead", "Caption", "DiffStats", "DivergenceReport",
    "LangProfile", "LengthStats", "PunctProfile", "RebuildStrategy", "SentenceUnit", "SplitSpec", "Talk",
    "TalkCollection", "align", "compose", "count_tokens", "diff_stats", "export_bitext", "get_profile",
    "identity_map", "intersect_collections", "invert", "is_strong_terminal", "length_cost", "length_stats",
    "lexical_refine", "measure_divergence", "normalize_arabic", "parse_collection_xml", "parse_srt", "parse_vtt",
    "partition", "pivot_align", "rebuild", "tokenize",
]
