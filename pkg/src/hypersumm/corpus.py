"""Dialogue corpus model and line-delimited JSON serialization.

One self-contained JSON object per line, UTF-8, LF line endings:

    {"interview_id": "I1", "turn_index": 0, "speaker": "Interviewer",
     "role": "question", "text": "...", "lang": "en", "tags": []}

``role`` defaults to ``"other"`` when absent, ``lang`` to ``"und"`` and
``tags`` to an empty list. Records that share an ``interview_id`` merge into
one dialogue ordered by ``turn_index``; indices must be contiguous from 0.
Unknown record fields survive a parse/serialize round-trip but are ignored
by every other operation in the toolkit.

Summary files use one record per line as well:

    {"dialogue_id": "I1", "summary": "..."}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

MASK_SPEAKER = "[MASK SPEAKER]"

_TURN_FIELDS = ("interview_id", "turn_index", "speaker", "role", "text", "lang", "tags")


class Role(str, Enum):
    QUESTION = "question"
    RESPONSE = "response"
    OTHER = "other"


class CorpusError(ValueError):
    """Malformed or inconsistent corpus data.

    ``line`` carries the 1-based line number of the offending record when the
    error arose while reading a stream.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass
class Turn:
    """A single contiguous utterance by one speaker."""

    interview_id: str
    turn_index: int
    speaker: str
    text: str
    role: Role = Role.OTHER
    lang: str = "und"
    tags: set[str] = field(default_factory=set)
    # Unknown record fields, kept only so serialization can round-trip them.
    extra: dict = field(default_factory=dict)

    def copy(self) -> Turn:
        return replace(self, tags=set(self.tags), extra=dict(self.extra))


@dataclass
class Dialogue:
    """Ordered turns of one interview."""

    interview_id: str
    turns: list[Turn]


@dataclass
class Corpus:
    """All dialogues of a dataset, ordered by interview id."""

    dialogues: list[Dialogue] = field(default_factory=list)

    def get(self, interview_id: str) -> Dialogue:
        for dialogue in self.dialogues:
            if dialogue.interview_id == interview_id:
                return dialogue
        raise KeyError(interview_id)

    def ids(self) -> list[str]:
        return [d.interview_id for d in self.dialogues]

    def n_turns(self) -> int:
        return sum(len(d.turns) for d in self.dialogues)


@dataclass
class SummaryPair:
    """A dialogue's assembled source text with its supplied target summary."""

    dialogue_id: str
    source_text: str
    target_summary: str


def _require(obj: dict, key: str, line: int | None) -> object:
    if key not in obj:
        raise CorpusError(f"missing field '{key}'", line)
    return obj[key]


def _require_str(obj: dict, key: str, line: int | None) -> str:
    value = _require(obj, key, line)
    if not isinstance(value, str):
        raise CorpusError(f"field '{key}' must be a string", line)
    return value


def turn_from_record(obj: dict, line: int | None = None) -> Turn:
    """Build a Turn from a decoded record dict, validating field types."""
    interview_id = _require_str(obj, "interview_id", line)
    if not interview_id:
        raise CorpusError("interview_id must be non-empty", line)

    turn_index = _require(obj, "turn_index", line)
    if isinstance(turn_index, bool) or not isinstance(turn_index, int):
        raise CorpusError("field 'turn_index' must be an integer", line)
    if turn_index < 0:
        raise CorpusError(f"turn_index must be >= 0, got {turn_index}", line)

    speaker = _require_str(obj, "speaker", line)
    if not speaker:
        raise CorpusError("speaker must be non-empty", line)

    text = _require_str(obj, "text", line)

    role_value = obj.get("role", Role.OTHER.value)
    try:
        role = Role(role_value)
    except ValueError:
        raise CorpusError(f"unknown role {role_value!r}", line) from None

    lang = obj.get("lang", "und")
    if not isinstance(lang, str):
        raise CorpusError("field 'lang' must be a string", line)

    tags_value = obj.get("tags", [])
    if not isinstance(tags_value, list) or not all(isinstance(t, str) for t in tags_value):
        raise CorpusError("field 'tags' must be a list of strings", line)

    extra = {k: v for k, v in obj.items() if k not in _TURN_FIELDS}
    return Turn(
        interview_id=interview_id,
        turn_index=turn_index,
        speaker=speaker,
        text=text,
        role=role,
        lang=lang,
        tags=set(tags_value),
        extra=extra,
    )


def turn_to_record(turn: Turn) -> dict:
    record = dict(turn.extra)
    record.update(
        interview_id=turn.interview_id,
        turn_index=turn.turn_index,
        speaker=turn.speaker,
        role=turn.role.value,
        text=turn.text,
        lang=turn.lang,
        tags=sorted(turn.tags),
    )
    return record


# Line separators above U+001F that json.dumps(ensure_ascii=False) leaves
# unescaped; literal occurrences would break one-record-per-line streams.
_LINE_SEPARATOR_ESCAPES = {
    "\x85": "\\u0085",
    " ": "\\u2028",
    " ": "\\u2029",
}


def dumps_record(record: dict) -> str:
    """Canonical one-line JSON encoding: sorted keys, no ASCII escaping."""
    encoded = json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    for char, escape in _LINE_SEPARATOR_ESCAPES.items():
        if char in encoded:
            encoded = encoded.replace(char, escape)
    return encoded


def parse_corpus(stream: Iterable[str]) -> Corpus:
    """Parse line-delimited turn records into a Corpus.

    Records for the same interview merge into one Dialogue sorted by
    turn_index. Raises CorpusError (with the offending line number) on
    malformed records, duplicate (interview_id, turn_index) pairs, and
    non-contiguous indices. Blank lines are skipped.
    """
    by_interview: dict[str, list[Turn]] = {}
    line_of: dict[tuple[str, int], int] = {}
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON record: {exc.msg}", line_no) from None
        if not isinstance(obj, dict):
            raise CorpusError("record must be a JSON object", line_no)
        turn = turn_from_record(obj, line_no)
        key = (turn.interview_id, turn.turn_index)
        if key in line_of:
            raise CorpusError(
                f"duplicate (interview_id, turn_index) = ({turn.interview_id}, {turn.turn_index}),"
                f" first seen on line {line_of[key]}",
                line_no,
            )
        line_of[key] = line_no
        by_interview.setdefault(turn.interview_id, []).append(turn)

    dialogues = []
    for interview_id in sorted(by_interview):
        turns = sorted(by_interview[interview_id], key=lambda t: t.turn_index)
        for expected, turn in enumerate(turns):
            if turn.turn_index != expected:
                raise CorpusError(
                    f"non-contiguous turn_index at {interview_id}:"
                    f" expected {expected}, found {turn.turn_index}",
                    line_of[(interview_id, turn.turn_index)],
                )
        dialogues.append(Dialogue(interview_id, turns))
    return Corpus(dialogues)


def serialize_corpus(corpus: Corpus) -> str:
    """Serialize a corpus to line-delimited records.

    Output lines are sorted by (interview_id, turn_index), so the same corpus
    always serializes to identical bytes and parse(serialize(c)) == c.
    """
    lines = []
    for dialogue in sorted(corpus.dialogues, key=lambda d: d.interview_id):
        for turn in sorted(dialogue.turns, key=lambda t: t.turn_index):
            lines.append(dumps_record(turn_to_record(turn)) + "\n")
    return "".join(lines)


def validate_corpus(corpus: Corpus) -> None:
    """Check dialogue invariants on a programmatically built corpus."""
    seen = set()
    for dialogue in corpus.dialogues:
        if not dialogue.turns:
            raise CorpusError(f"dialogue {dialogue.interview_id!r} has no turns")
        if dialogue.interview_id in seen:
            raise CorpusError(f"duplicate dialogue {dialogue.interview_id!r}")
        seen.add(dialogue.interview_id)
        for expected, turn in enumerate(dialogue.turns):
            if turn.interview_id != dialogue.interview_id:
                raise CorpusError(
                    f"turn interview_id {turn.interview_id!r} does not match"
                    f" dialogue {dialogue.interview_id!r}"
                )
            if turn.turn_index != expected:
                raise CorpusError(
                    f"non-contiguous turn_index at {dialogue.interview_id}:"
                    f" expected {expected}, found {turn.turn_index}"
                )
            if not turn.speaker:
                raise CorpusError(
                    f"empty speaker at ({dialogue.interview_id},{turn.turn_index})"
                )


def load_corpus(path: str | Path) -> Corpus:
    with open(path, encoding="utf-8") as handle:
        return parse_corpus(handle)


def dump_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(serialize_corpus(corpus))


def parse_summary_file(stream: Iterable[str]) -> list[tuple[str, str]]:
    """Parse line-delimited {"dialogue_id", "summary"} records."""
    entries = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON record: {exc.msg}", line_no) from None
        if not isinstance(obj, dict):
            raise CorpusError("record must be a JSON object", line_no)
        dialogue_id = _require_str(obj, "dialogue_id", line_no)
        summary = _require_str(obj, "summary", line_no)
        if not dialogue_id:
            raise CorpusError("dialogue_id must be non-empty", line_no)
        if not summary:
            raise CorpusError("summary must be non-empty", line_no)
        entries.append((dialogue_id, summary))
    return entries


def load_summary_file(path: str | Path) -> list[tuple[str, str]]:
    with open(path, encoding="utf-8") as handle:
        return parse_summary_file(handle)
