"""Transcript preparation: pluggable translation, text cleaning, Q/R assembly.

Translation is a text-transform adapter applied per turn; the default is the
identity function, so the stage is a structural no-op unless a real backend
is plugged in. Cleaning strips a configurable character set (default: all
Unicode punctuation except ``. ? ! ' -``), optionally drops tokens from an
untranslatable-word lexicon and collapses whitespace runs.
"""

from __future__ import annotations

import re
import sys
import unicodedata
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

from .corpus import Corpus, CorpusError, Dialogue, Role, SummaryPair

KEEP_PUNCTUATION = frozenset(".?!'-")

_WS_RUN = re.compile(r"\s+")


class TranslateError(RuntimeError):
    """Adapter failure while translating a turn."""


@lru_cache(maxsize=1)
def default_strip_chars() -> frozenset[str]:
    """Every Unicode punctuation character except KEEP_PUNCTUATION.

    This default is the toolkit's own definition of "special characters";
    sentence-final punctuation, apostrophes and hyphens are kept so later
    sentence-boundary splitting still works.
    """
    stripped = set()
    for codepoint in range(sys.maxunicode + 1):
        ch = chr(codepoint)
        if unicodedata.category(ch).startswith("P") and ch not in KEEP_PUNCTUATION:
            stripped.add(ch)
    return frozenset(stripped)


@dataclass(frozen=True)
class CleanPolicy:
    """Parameters of the text-cleaning stage."""

    strip_chars: frozenset[str] = field(default_factory=default_strip_chars)
    collapse_whitespace: bool = True
    drop_untranslatable: bool = False
    untranslatable_lexicon: frozenset[str] = frozenset()

    def __post_init__(self):
        for ch in self.strip_chars:
            category = unicodedata.category(ch)
            if category.startswith("L") or category.startswith("N"):
                raise ValueError(f"strip_chars must not contain letters or digits: {ch!r}")


def clean_text(text: str, policy: CleanPolicy) -> str:
    """Clean one text according to the policy. Idempotent.

    Characters in ``strip_chars`` are removed first, then lexicon tokens are
    dropped (whole whitespace-delimited tokens only), then whitespace runs
    collapse to single spaces when enabled. The result is trimmed.
    """
    out = "".join(ch for ch in text if ch not in policy.strip_chars)
    if policy.drop_untranslatable and policy.untranslatable_lexicon:
        out = _drop_tokens(out, policy.untranslatable_lexicon)
    if policy.collapse_whitespace:
        out = _WS_RUN.sub(" ", out)
    return out.strip()


def _drop_tokens(text: str, lexicon: frozenset[str]) -> str:
    # re.split with a capturing group keeps separators at odd indices, so the
    # original whitespace survives around tokens that are kept.
    pieces = re.split(r"(\s+)", text)
    kept: list[str] = []
    skip_separator = False
    for i, piece in enumerate(pieces):
        if i % 2 == 0:
            if piece in lexicon:
                skip_separator = True
                continue
            kept.append(piece)
            skip_separator = False
        elif not skip_separator:
            kept.append(piece)
        else:
            skip_separator = False
    return "".join(kept)


Adapter = Callable[[str], str]

ADAPTERS: dict[str, Adapter] = {
    "identity": lambda text: text,
    "uppercase": str.upper,
    "lowercase": str.lower,
}


def get_adapter(name: str) -> Adapter:
    try:
        return ADAPTERS[name]
    except KeyError:
        raise ValueError(
            f"unknown adapter {name!r}; available: {', '.join(sorted(ADAPTERS))}"
        ) from None


def translate_stage(dialogue: Dialogue, adapter: Adapter, target_lang: str) -> Dialogue:
    """Apply a text-transform adapter to every turn and retag the language.

    Turn count and order are preserved. An adapter exception is wrapped in a
    TranslateError naming the failing (interview_id, turn_index).
    """
    turns = []
    for turn in dialogue.turns:
        try:
            translated = adapter(turn.text)
        except Exception as exc:
            raise TranslateError(
                f"translate failed at ({dialogue.interview_id},{turn.turn_index})"
            ) from exc
        turns.append(replace(turn, text=translated, lang=target_lang))
    return Dialogue(dialogue.interview_id, turns)


def build_qr_text(dialogue: Dialogue) -> str:
    """Concatenate a dialogue into one prefixed text block.

    Question turns become "Q: <text>", response turns "R: <text>" and any
    other turn "<speaker>: <text>"; turns are joined with single newlines in
    index order, so the line count equals the turn count.
    """
    lines = []
    for turn in dialogue.turns:
        if turn.role is Role.QUESTION:
            lines.append(f"Q: {turn.text}")
        elif turn.role is Role.RESPONSE:
            lines.append(f"R: {turn.text}")
        else:
            lines.append(f"{turn.speaker}: {turn.text}")
    return "\n".join(lines)


def clean_dialogue(dialogue: Dialogue, policy: CleanPolicy) -> Dialogue:
    """Clean every turn text; a text that cleans to empty is a data error."""
    turns = []
    for turn in dialogue.turns:
        cleaned = clean_text(turn.text, policy)
        if not cleaned:
            raise CorpusError(
                f"text empty after cleaning at ({dialogue.interview_id},{turn.turn_index})"
            )
        turns.append(replace(turn, text=cleaned))
    return Dialogue(dialogue.interview_id, turns)


def preprocess_corpus(
    corpus: Corpus,
    policy: CleanPolicy,
    adapter: Adapter = ADAPTERS["identity"],
    target_lang: str = "en",
) -> Corpus:
    """Run the translate and clean stages over every dialogue."""
    dialogues = []
    for dialogue in corpus.dialogues:
        translated = translate_stage(dialogue, adapter, target_lang)
        dialogues.append(clean_dialogue(translated, policy))
    return Corpus(dialogues)


def make_summary_pairs(corpus: Corpus, entries: list[tuple[str, str]]) -> list[SummaryPair]:
    """Pair supplied summaries with their dialogues' assembled Q/R texts."""
    pairs = []
    for dialogue_id, summary in entries:
        try:
            dialogue = corpus.get(dialogue_id)
        except KeyError:
            raise CorpusError(
                f"summary references unknown dialogue_id '{dialogue_id}'"
            ) from None
        pairs.append(SummaryPair(dialogue_id, build_qr_text(dialogue), summary))
    return pairs
