"""Token-format serialization, parsing, and prediction classification."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialogkit import (
    ApiInvocation,
    ApiResult,
    Calls,
    Malformed,
    ParseError,
    Speaker,
    Utterance,
    Verbal,
    classify_prediction,
    parse_stream,
    parse_tokens,
    serialize_event,
    serialize_events,
    split_input,
    tokenize,
)

from conftest import GOLDEN_EVENTS, GOLDEN_SERIALIZED, random_dialog


class TestSerialize:
    def test_golden_dialog_byte_exact(self):
        assert serialize_events(GOLDEN_EVENTS) == GOLDEN_SERIALIZED

    def test_user_utterance(self):
        assert serialize_event(Utterance(Speaker.USER, "hi")) == "<U>hi"

    def test_agent_utterance(self):
        assert serialize_event(Utterance(Speaker.AGENT, "hello")) == "<A>hello"

    def test_invocation_with_args(self):
        inv = ApiInvocation("find_movies", (("name.genre", "action"),))
        assert serialize_event(inv) == "<PN>find_movies<PAN>name.genre<PAV>action"

    def test_invocation_without_args(self):
        assert serialize_event(ApiInvocation("find_movies", ())) == "<PN>find_movies"

    def test_result_multi_value(self):
        res = ApiResult("find_movies", (("name.movie", ("John Wick", "Jack Ryan")),))
        assert (
            serialize_event(res)
            == "<PR>find_movies<PRAN>name.movie<PRAV>John Wick<PRAV>Jack Ryan"
        )

    def test_no_separators_between_marker_and_payload(self):
        text = serialize_events(GOLDEN_EVENTS[:2])
        assert "<U> " not in text
        assert " <A>" not in text


class TestTokenizeAndParse:
    def test_round_trip_golden(self):
        assert parse_stream(GOLDEN_SERIALIZED) == list(GOLDEN_EVENTS)

    def test_tokenize_positions(self):
        toks = tokenize("<U>hi<A>yo")
        assert [(t.kind.literal, t.payload, t.offset) for t in toks] == [
            ("<U>", "hi", 0),
            ("<A>", "yo", 5),
        ]

    def test_leading_junk_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_stream("junk<U>hi")
        assert exc.value.position == 0

    def test_unknown_marker_candidate_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_stream("<U>see <XYZQ> there")
        assert "unknown marker" in exc.value.reason

    def test_lowercase_angle_text_is_plain_payload(self):
        events = parse_stream("<U>it is 3 <half> past")
        assert events == [Utterance(Speaker.USER, "it is 3 <half> past")]

    def test_empty_payload_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<U><A>reply")

    def test_dangling_arg_name_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<PN>find_movies<PAN>name.genre")

    def test_arg_value_without_name_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<PN>find_movies<PAV>action")

    def test_result_value_without_name_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<PR>find_movies<PRAV>John Wick")

    def test_result_name_without_value_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<PR>find_movies<PRAN>name.movie")

    def test_call_attrs_outside_call_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<U>hi<PAN>name.genre<PAV>action")

    def test_bad_api_name_rejected(self):
        with pytest.raises(ParseError):
            parse_stream("<PN>Find Movies")

    def test_parse_error_carries_position(self):
        text = "<U>hi<PAV>stray"
        with pytest.raises(ParseError) as exc:
            parse_stream(text)
        assert exc.value.position == text.index("<PAV>")

    def test_parse_tokens_equivalent_to_parse_stream(self):
        toks = tokenize(GOLDEN_SERIALIZED)
        assert parse_tokens(toks) == parse_stream(GOLDEN_SERIALIZED)


class TestSplitInput:
    def test_without_context(self):
        recent, context = split_input("<U>hi")
        assert recent == "<U>hi"
        assert context is None

    def test_with_context(self):
        recent, context = split_input("<U>again<C><U>hi<A>yo")
        assert recent == "<U>again"
        assert context == "<U>hi<A>yo"

    def test_at_most_one_separator(self):
        with pytest.raises(ParseError):
            split_input("<U>a<C><U>b<C><U>c")


class TestClassifyPrediction:
    def test_verbal(self):
        outcome = classify_prediction("<A>Sounds good.")
        assert isinstance(outcome, Verbal)
        assert [u.text for u in outcome.utterances] == ["Sounds good."]

    def test_calls(self):
        outcome = classify_prediction("<PN>find_movies<PAN>name.genre<PAV>action")
        assert isinstance(outcome, Calls)
        assert outcome.invocations[0].name == "find_movies"

    def test_multiple_calls(self):
        outcome = classify_prediction("<PN>find_movies<PN>find_theaters<PAN>location<PAV>here")
        assert isinstance(outcome, Calls)
        assert [i.name for i in outcome.invocations] == ["find_movies", "find_theaters"]

    def test_malformed_empty(self):
        outcome = classify_prediction("")
        assert isinstance(outcome, Malformed)
        assert outcome.reason == "empty prediction"

    def test_malformed_input_side(self):
        outcome = classify_prediction("<U>I am the user")
        assert isinstance(outcome, Malformed)
        assert outcome.reason == "input-side event in prediction"

    def test_malformed_result_side(self):
        outcome = classify_prediction("<PR>find_movies<PRAN>k<PRAV>v")
        assert isinstance(outcome, Malformed)
        assert outcome.reason == "input-side event in prediction"

    def test_malformed_mixed(self):
        outcome = classify_prediction("<A>ok<PN>find_movies")
        assert isinstance(outcome, Malformed)
        assert outcome.reason == "mixed verbal and call prediction"

    def test_malformed_unparseable(self):
        outcome = classify_prediction("<PN>find_movies<PAN>dangling")
        assert isinstance(outcome, Malformed)
        assert outcome.error is not None


class TestRoundTripProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_parse_inverts_serialize(self, seed):
        dialog = random_dialog(random.Random(seed), f"d{seed}")
        text = serialize_events(dialog.events)
        assert tuple(parse_stream(text)) == dialog.events

    @given(
        st.lists(
            st.text(min_size=1).filter(
                lambda s: "<" not in s and ">" not in s and s.strip() and "\x00" not in s
            ),
            min_size=1,
            max_size=5,
        )
    )
    def test_utterance_payloads_survive(self, texts):
        events = tuple(Utterance(Speaker.USER, t) for t in texts)
        assert tuple(parse_stream(serialize_events(events))) == events
