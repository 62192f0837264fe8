import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from hypersumm.corpus import CorpusError, Dialogue, Role
from hypersumm.preprocess import (
    CleanPolicy,
    TranslateError,
    build_qr_text,
    clean_dialogue,
    clean_text,
    default_strip_chars,
    get_adapter,
    make_summary_pairs,
    translate_stage,
)

from conftest import make_dialogue, make_turn, texts_st


def policy(**kwargs):
    defaults = dict(strip_chars=frozenset(), collapse_whitespace=False,
                    drop_untranslatable=False, untranslatable_lexicon=frozenset())
    defaults.update(kwargs)
    return CleanPolicy(**defaults)


class TestCleanText:
    def test_collapse_whitespace(self):
        assert clean_text("a  b", policy(collapse_whitespace=True)) == "a b"

    def test_strip_keeps_non_ascii_letters(self):
        assert clean_text("héllo~!", policy(strip_chars=frozenset("~!"))) == "héllo"

    def test_lexicon_drop(self):
        p = policy(drop_untranslatable=True, untranslatable_lexicon=frozenset({"der"}))
        assert clean_text("der cat sat", p) == "cat sat"

    def test_lexicon_drop_mid_and_end(self):
        p = policy(drop_untranslatable=True, untranslatable_lexicon=frozenset({"und"}))
        assert clean_text("cat und dog und", p) == "cat dog"

    def test_strip_then_drop_interaction(self):
        # stripping can expose a lexicon token; both happen in one pass
        p = policy(strip_chars=frozenset("~"), drop_untranslatable=True,
                   untranslatable_lexicon=frozenset({"der"}))
        assert clean_text("d~er cat", p) == "cat"
        assert clean_text(clean_text("d~er cat", p), p) == "cat"

    def test_default_strip_set(self):
        chars = default_strip_chars()
        assert set(".?!'-").isdisjoint(chars)
        # punctuation-category characters only; symbols like ~ stay
        assert {"@", ",", ";", "(", "«", "„"} <= chars
        assert "~" not in chars
        cleaned = clean_text("Wait, really?! (yes)", CleanPolicy())
        assert cleaned == "Wait really?! yes"

    def test_result_trimmed(self):
        assert clean_text("  spaced out  ", policy(collapse_whitespace=True)) == "spaced out"

    @given(text=texts_st)
    @settings(max_examples=100)
    def test_idempotent_default_policy(self, text):
        p = CleanPolicy()
        assert clean_text(clean_text(text, p), p) == clean_text(text, p)

    @given(
        text=st.text(alphabet="ab~! \tder", max_size=30),
        collapse=st.booleans(),
        drop=st.booleans(),
    )
    @settings(max_examples=100)
    def test_idempotent_custom_policies(self, text, collapse, drop):
        p = policy(strip_chars=frozenset("~!"), collapse_whitespace=collapse,
                   drop_untranslatable=drop, untranslatable_lexicon=frozenset({"der"}))
        once = clean_text(text, p)
        assert clean_text(once, p) == once

    def test_policy_rejects_letters_and_digits(self):
        with pytest.raises(ValueError, match="letters or digits"):
            CleanPolicy(strip_chars=frozenset("a"))
        with pytest.raises(ValueError, match="letters or digits"):
            CleanPolicy(strip_chars=frozenset("٣"))  # non-ASCII digit


class TestTranslateStage:
    def test_identity_adapter_changes_only_lang(self):
        dialogue = make_dialogue(texts=("eins", "zwei", "drei"))
        out = translate_stage(dialogue, get_adapter("identity"), "en")
        assert [t.text for t in out.turns] == ["eins", "zwei", "drei"]
        assert all(t.lang == "en" for t in out.turns)
        assert [t.turn_index for t in out.turns] == [0, 1, 2]

    def test_uppercase_adapter_keeps_count_and_order(self):
        dialogue = make_dialogue(texts=("a", "b", "c"))
        out = translate_stage(dialogue, get_adapter("uppercase"), "en")
        assert [t.text for t in out.turns] == ["A", "B", "C"]
        assert len(out.turns) == 3

    def test_adapter_failure_names_turn(self):
        def boom(text):
            if text == "zwei":
                raise RuntimeError("backend down")
            return text

        dialogue = make_dialogue(texts=("eins", "zwei"))
        with pytest.raises(TranslateError, match=r"translate failed at \(I1,1\)"):
            translate_stage(dialogue, boom, "en")

    def test_unknown_adapter_name(self):
        with pytest.raises(ValueError, match="unknown adapter"):
            get_adapter("google")


class TestBuildQrText:
    def test_question_response_prefixes(self):
        dialogue = make_dialogue(
            texts=("why?", "because."),
            roles=[Role.QUESTION, Role.RESPONSE],
        )
        assert build_qr_text(dialogue) == "Q: why?\nR: because."

    def test_other_role_uses_speaker(self):
        dialogue = Dialogue("I1", [make_turn("I1", 0, speaker="PM", text="hi")])
        assert build_qr_text(dialogue) == "PM: hi"

    def test_line_count_equals_turn_count(self):
        dialogue = make_dialogue(
            texts=("a", "b", "c", "d"),
            roles=[Role.OTHER, Role.QUESTION, Role.RESPONSE, Role.OTHER],
        )
        lines = build_qr_text(dialogue).split("\n")
        assert len(lines) == 4
        assert lines[1] == "Q: b"
        assert lines[2] == "R: c"


def test_clean_dialogue_rejects_emptied_text():
    dialogue = make_dialogue(texts=("fine", "..."))
    # default policy keeps dots, so force-strip them
    p = policy(strip_chars=frozenset(".,"), collapse_whitespace=True)
    with pytest.raises(CorpusError, match=r"\(I1,1\)"):
        clean_dialogue(dialogue, p)


def test_make_summary_pairs_resolves_and_rejects():
    from hypersumm.corpus import Corpus

    corpus = Corpus([make_dialogue(texts=("hi", "yo"))])
    pairs = make_summary_pairs(corpus, [("I1", "summary text")])
    assert pairs[0].dialogue_id == "I1"
    assert pairs[0].source_text == build_qr_text(corpus.get("I1"))
    with pytest.raises(CorpusError, match="unknown dialogue_id 'I9'"):
        make_summary_pairs(corpus, [("I9", "x")])
