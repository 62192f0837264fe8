"""Toolkit for long multi-turn interview dialogues.

Covers the full workflow from raw transcripts to analysis artifacts:
ingestion of line-delimited dialogue records, cleaning and Q/R text
assembly, seeded window-based corruption for denoising training pairs,
from-scratch ROUGE-N / ROUGE-L scoring, and export of a navigable
hypertext graph as static HTML plus a graph record file.
"""

from .corpus import (
    MASK_SPEAKER,
    Corpus,
    CorpusError,
    Dialogue,
    Role,
    SummaryPair,
    Turn,
    parse_corpus,
    serialize_corpus,
)
from .hypergraph import HyperEdge, HyperGraph, HyperNode, ThemeLexicon, build_graph, export_html
from .noise import CorruptionPlan, DenoisePair, NoiseConfig, apply_window_denoise, replay_plan
from .preprocess import CleanPolicy, build_qr_text, clean_text, translate_stage
from .rouge import RougeScore, lcs_length, rouge_l, rouge_n, score_corpus, tokenize

__version__ = "0.1.0"

__all__ = [
    "MASK_SPEAKER",
    "CleanPolicy",
    "Corpus",
    "CorpusError",
    "CorruptionPlan",
    "DenoisePair",
    "Dialogue",
    "HyperEdge",
    "HyperGraph",
    "HyperNode",
    "NoiseConfig",
    "Role",
    "RougeScore",
    "SummaryPair",
    "ThemeLexicon",
    "Turn",
    "apply_window_denoise",
    "build_graph",
    "build_qr_text",
    "clean_text",
    "export_html",
    "lcs_length",
    "parse_corpus",
    "replay_plan",
    "rouge_l",
    "rouge_n",
    "score_corpus",
    "serialize_corpus",
    "tokenize",
    "translate_stage",
]
