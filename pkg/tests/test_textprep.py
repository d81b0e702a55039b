"""Segmentation, tokenization, detokenization, and pair extraction."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibsum import (
    RawDocument,
    TokenizedSentence,
    detokenize,
    extract_pairs,
    segment_sentences,
    tokenize,
    word_tokens,
)


class TestSegmentation:
    def test_empty_body_yields_no_sentences(self):
        assert segment_sentences("") == []

    def test_plain_boundaries(self):
        assert segment_sentences("A. B. C.") == ["A.", "B.", "C."]

    def test_abbreviation_guard(self):
        assert segment_sentences("Mr. Smith left. He returned.") == [
            "Mr. Smith left.",
            "He returned.",
        ]

    def test_acronym_in_abbreviation_list(self):
        assert segment_sentences("The U.S. economy grew. Markets rose.") == [
            "The U.S. economy grew.",
            "Markets rose.",
        ]

    def test_decimal_numbers_do_not_split(self):
        assert segment_sentences("Prices rose 3.5 percent. Then they fell.") == [
            "Prices rose 3.5 percent.",
            "Then they fell.",
        ]

    def test_question_and_exclamation(self):
        assert segment_sentences("Really? Yes! Fine.") == ["Really?", "Yes!", "Fine."]

    def test_trailing_fragment_kept(self):
        assert segment_sentences("First sentence. trailing fragment") == [
            "First sentence.",
            "trailing fragment",
        ]

    def test_blank_line_is_hard_boundary(self):
        assert segment_sentences("A headline\n\nBody text here.") == [
            "A headline",
            "Body text here.",
        ]

    def test_whitespace_only_dropped(self):
        assert segment_sentences("   \n\t  ") == []

    def test_coverage_of_non_whitespace(self):
        body = "One two. Three four! Five"
        joined = "".join("".join(s.split()) for s in segment_sentences(body))
        assert joined == "".join(body.split())


class TestTokenize:
    def test_spec_surface(self):
        assert word_tokens("Hong Kong, a bustling metropolis") == [
            "Hong",
            "Kong",
            ",",
            "a",
            "bustling",
            "metropolis",
        ]

    def test_empty(self):
        assert word_tokens("") == []
        assert tokenize("").tokens == ()

    def test_abbreviation_period_kept(self):
        assert word_tokens("U.S. talks resumed") == ["U.S.", "talks", "resumed"]

    def test_terminal_punctuation_split(self):
        assert word_tokens("the cat sat.") == ["the", "cat", "sat", "."]

    def test_nested_punctuation(self):
        assert word_tokens('he said "wait!"') == ["he", "said", '"', "wait", "!", '"']

    def test_decimal_number_whole(self):
        assert word_tokens("rose 3.5 percent") == ["rose", "3.5", "percent"]

    def test_tokens_have_no_whitespace(self):
        for tok in word_tokens("a b\tc\nd  e"):
            assert tok and not any(ch.isspace() for ch in tok)

    def test_deterministic(self):
        text = 'Mr. Smith said "U.S. prices (3.5%) fell, then rose!"'
        assert word_tokens(text) == word_tokens(text)


class TestDetokenize:
    def test_empty(self):
        assert detokenize([]) == ""

    def test_attach_period(self):
        assert detokenize(["the", "cat", "sat", "."]) == "the cat sat."

    def test_attach_comma(self):
        assert detokenize(["Hong", "Kong", ","]) == "Hong Kong,"

    def test_open_bracket_attaches_right(self):
        assert detokenize(["(", "a", ")"]) == "(a)"

    def test_merge_guard_prevents_accidental_acronym(self):
        # "U.S" + "." would re-tokenize as one token, so the space is kept.
        assert detokenize(["U.S", "."]) == "U.S ."
        assert word_tokens(detokenize(["U.S", "."])) == ["U.S", "."]

    @pytest.mark.parametrize(
        "text",
        [
            "the cat sat.",
            "Hong Kong, a bustling metropolis",
            'he said "wait!"',
            "U.S. talks (finally) resumed, briefly.",
            "A. B. C.",
            "it's done... right?",
        ],
    )
    def test_round_trip(self, text):
        tokens = word_tokens(text)
        assert word_tokens(detokenize(tokens)) == tokens


@settings(max_examples=300, deadline=None)
@given(
    st.text(
        alphabet="abcXYZ19 .,!?;:()\"'«»…-",
        max_size=60,
    )
)
def test_round_trip_property(text):
    tokens = word_tokens(text)
    assert word_tokens(detokenize(tokens)) == tokens


class TestTokenizedSentence:
    def test_char_len_matches_raw(self):
        sent = tokenize("the cat sat.")
        assert sent.char_len == len(sent.raw) == 12

    def test_invariant_violation_rejected(self):
        with pytest.raises(ValueError):
            TokenizedSentence(tokens=(), raw="abc", char_len=3)
        with pytest.raises(ValueError):
            TokenizedSentence(tokens=("a b",), raw="a b", char_len=3)

    def test_from_tokens_round_trips(self):
        sent = TokenizedSentence.from_tokens(["the", "cat", "."])
        assert sent.raw == "the cat."
        assert tokenize(sent.raw).tokens == sent.tokens


class TestExtractPairs:
    def test_single_sentence_no_pairs(self):
        assert extract_pairs(RawDocument(id="d", body="Just one sentence.")) == []

    def test_empty_document(self):
        assert extract_pairs(RawDocument(id="d", body="")) == []

    def test_adjacency(self):
        doc = RawDocument(id="d", body="First one. Second one. Third one.")
        pairs = extract_pairs(doc)
        assert len(pairs) == 2
        assert pairs[0].source.raw == "First one."
        assert pairs[0].next.raw == "Second one."
        assert pairs[1].source.raw == "Second one."
        assert pairs[1].next.raw == "Third one."
        assert [p.position for p in pairs] == [0, 1]
        assert all(p.doc_id == "d" for p in pairs)

    def test_pair_count_is_sentences_minus_one(self):
        for n in range(1, 6):
            body = " ".join(f"Sentence number {i} ends." for i in range(n))
            doc = RawDocument(id="d", body=body)
            assert len(extract_pairs(doc)) == n - 1

    def test_doc_id_required(self):
        with pytest.raises(ValueError):
            RawDocument(id="", body="x")
