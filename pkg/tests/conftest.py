"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import hypothesis.strategies as st

from hypersumm.corpus import Corpus, Dialogue, Role, Turn

WORDS = [
    "robot", "leader", "task", "voice", "team", "answer", "question",
    "friendly", "reward", "vision", "gesture", "trust", "step", "plan",
]


def make_turn(interview_id="I1", turn_index=0, speaker="A", text="hello there",
              role=Role.OTHER, lang="en", tags=None):
    return Turn(
        interview_id=interview_id,
        turn_index=turn_index,
        speaker=speaker,
        text=text,
        role=role,
        lang=lang,
        tags=set(tags or ()),
    )


def make_dialogue(interview_id="I1", texts=("one two", "three four"), roles=None,
                  speakers=None):
    roles = roles or [Role.OTHER] * len(texts)
    speakers = speakers or [f"S{i % 3}" for i in range(len(texts))]
    turns = [
        make_turn(interview_id, i, speakers[i], texts[i], roles[i])
        for i in range(len(texts))
    ]
    return Dialogue(interview_id, turns)


def record_line(interview_id="I1", turn_index=0, speaker="A", role="other",
                text="hi", lang="en", tags=()):
    import json

    return json.dumps(
        {
            "interview_id": interview_id,
            "turn_index": turn_index,
            "speaker": speaker,
            "role": role,
            "text": text,
            "lang": lang,
            "tags": list(tags),
        }
    )


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------

texts_st = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)),
    max_size=40,
)

word_st = st.sampled_from(WORDS)

sentence_st = st.lists(word_st, min_size=1, max_size=12).map(" ".join)


@st.composite
def turns_st(draw, interview_id, turn_index):
    return Turn(
        interview_id=interview_id,
        turn_index=turn_index,
        speaker=draw(st.sampled_from(["A", "B", "Interviewer", "P1", "[MASK SPEAKER]"])),
        text=draw(texts_st),
        role=draw(st.sampled_from(list(Role))),
        lang=draw(st.sampled_from(["en", "de", "und"])),
        tags=set(draw(st.lists(st.sampled_from(["x", "y", "z"]), max_size=2))),
    )


@st.composite
def dialogues_st(draw, interview_id=None):
    if interview_id is None:
        interview_id = draw(st.text(
            alphabet="ABCdef123-_", min_size=1, max_size=6,
        ))
    n = draw(st.integers(min_value=1, max_value=6))
    turns = [draw(turns_st(interview_id, i)) for i in range(n)]
    return Dialogue(interview_id, turns)


@st.composite
def corpora_st(draw):
    ids = draw(st.lists(
        st.text(alphabet="ABCdef123-_", min_size=1, max_size=6),
        min_size=0, max_size=4, unique=True,
    ))
    return Corpus([draw(dialogues_st(interview_id=i)) for i in sorted(ids)])


@st.composite
def windows_st(draw, min_size=1, max_size=8):
    """Windows of turns with non-empty token texts, for noise-op properties."""
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    return [
        Turn(
            interview_id="W1",
            turn_index=i,
            speaker=draw(st.sampled_from(["A", "B", "C"])),
            text=draw(sentence_st),
            role=draw(st.sampled_from(list(Role))),
        )
        for i in range(n)
    ]
