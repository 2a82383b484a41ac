"""Argument resolution and KB execution: dates, locations, dispatch, booking."""

from __future__ import annotations

import datetime as dt
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialogkit import (
    ApiAdapter,
    ApiInvocation,
    KnowledgeBase,
    ResolutionContext,
    invoke,
    resolve_args,
)
from dialogkit.adapter import (
    EMPTY_MATCH,
    EVENING_FILTER_ARG,
    EVENING_START,
    KbSchemaError,
    resolve_date_phrase,
)

from conftest import load_json

ANCHOR = dt.datetime(2020, 11, 5, 10, 0)


def make_ctx(anchor: dt.datetime = ANCHOR, location: str = "Mountain View") -> ResolutionContext:
    return ResolutionContext(clock_anchor=anchor, default_location=location)


class TestDateResolution:
    def test_frozen_cases(self):
        cases = load_json("date_cases.json")
        assert len(cases) == 88
        failures = []
        for case in cases:
            ctx = make_ctx(dt.datetime.fromisoformat(case["anchor"]))
            resolved, evening = resolve_date_phrase(case["phrase"], ctx)
            expected = case["resolved"]  # null means pass-through (no rewrite)
            got = resolved
            if got != expected or evening != case["evening_filter"]:
                failures.append((case, got, evening))
        assert not failures, failures[:5]

    def test_tonight_appends_evening_filter_once(self):
        inv = ApiInvocation(
            "find_showtimes",
            (fixed_args := (("location", "nearby"), ("name.movie", "John Wick"),
                            ("name.theater", "AMC 20"), ("date", "tonight"))),
        )
        resolved = resolve_args(inv, make_ctx())
        assert resolved.arg("date") == "2020-11-05"
        assert resolved.arg("location") == "Mountain View"
        assert resolved.arg(EVENING_FILTER_ARG) == EVENING_START
        names = [n for n, _ in resolved.args]
        assert names.count(EVENING_FILTER_ARG) == 1
        assert len(fixed_args) + 1 == len(resolved.args)

    def test_explicit_time_filter_not_overridden(self):
        inv = ApiInvocation(
            "find_showtimes",
            (("date", "tonight"), (EVENING_FILTER_ARG, "20:00")),
        )
        resolved = resolve_args(inv, make_ctx())
        assert resolved.arg(EVENING_FILTER_ARG) == "20:00"
        assert [n for n, _ in resolved.args].count(EVENING_FILTER_ARG) == 1

    def test_unknown_phrases_pass_through(self):
        inv = ApiInvocation("find_showtimes", (("date", "the 5th"), ("location", "downtown")))
        resolved = resolve_args(inv, make_ctx())
        assert resolved.arg("date") == "the 5th"
        assert resolved.arg("location") == "downtown"

    def test_weekday_on_or_after_anchor(self):
        # 2020-11-05 is a Thursday; "thursday" resolves to the anchor itself.
        ctx = make_ctx()
        assert resolve_date_phrase("thursday", ctx) == ("2020-11-05", False)
        assert resolve_date_phrase("friday", ctx) == ("2020-11-06", False)
        assert resolve_date_phrase("wednesday", ctx) == ("2020-11-11", False)

    def test_resolution_is_idempotent(self):
        inv = ApiInvocation(
            "find_showtimes",
            (("location", "nearby"), ("date", "tonight"), ("name.movie", "John Wick")),
        )
        ctx = make_ctx()
        once = resolve_args(inv, ctx)
        twice = resolve_args(once, ctx)
        assert once == twice

    @settings(deadline=None)
    @given(st.text(min_size=1, max_size=30).filter(lambda s: "<" not in s and s.strip()))
    def test_idempotence_over_arbitrary_values(self, value):
        inv = ApiInvocation("find_movies", (("date", value), ("location", value)))
        ctx = make_ctx()
        once = resolve_args(inv, ctx)
        assert resolve_args(once, ctx) == once

    def test_timezone_aware_anchor_uses_context_zone(self):
        aware = dt.datetime(2020, 11, 5, 23, 30, tzinfo=dt.timezone.utc)
        ctx = ResolutionContext(
            clock_anchor=aware, default_location="Mountain View", timezone="America/Los_Angeles"
        )
        # 23:30 UTC is 15:30 the same day in Los Angeles.
        assert ctx.anchor_date() == dt.date(2020, 11, 5)


class TestKnowledgeBase:
    def test_find_movies_by_genre(self, kb):
        assert kb.find_movies(None, "action") == ["John Wick", "Jack Ryan"]

    def test_find_movies_no_filter_lists_catalog(self, kb):
        titles = kb.find_movies(None, None)
        assert "John Wick" in titles and len(titles) >= 5

    def test_find_theaters(self, kb):
        assert kb.find_theaters("Mountain View", "John Wick") == ["AMC 20", "Century City 16"]

    def test_find_showtimes_with_evening_filter(self, kb):
        all_times = kb.find_showtimes("Mountain View", "John Wick", "AMC 20", "2020-11-05", None)
        evening = kb.find_showtimes(
            "Mountain View", "John Wick", "AMC 20", "2020-11-05", EVENING_START
        )
        assert all_times == ["13:00", "16:30", "19:00", "21:45"]
        assert evening == ["19:00", "21:45"]

    def test_booking_refs_are_monotonic(self, kb):
        first = kb.book("John Wick", "AMC 20", "2020-11-05", "19:00", "2")
        second = kb.book("John Wick", "AMC 20", "2020-11-05", "21:45", "3")
        n1 = int(first.ref_id.split("-")[1])
        n2 = int(second.ref_id.split("-")[1])
        assert first.ref_id.startswith("BK-") and len(first.ref_id) == 7
        assert n2 == n1 + 1

    def test_booking_does_not_consume_showtimes(self, kb):
        before = kb.find_showtimes("Mountain View", "John Wick", "AMC 20", "2020-11-05", None)
        kb.book("John Wick", "AMC 20", "2020-11-05", "19:00", "2")
        after = kb.find_showtimes("Mountain View", "John Wick", "AMC 20", "2020-11-05", None)
        assert before == after

    def test_schema_version_required(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text(json.dumps({"movies": [], "theaters": [], "showtimes": []}))
        with pytest.raises(KbSchemaError):
            KnowledgeBase.load(path)

    def test_dangling_showtime_reference_rejected(self, tmp_path):
        data = {
            "schema_version": 1,
            "movies": [{"title": "A Movie", "genres": ["drama"]}],
            "theaters": [{"name": "T1", "location": "X", "movie_titles": ["A Movie"]}],
            "showtimes": [
                {"movie": "A Movie", "theater": "Ghost Plex", "date": "2020-11-05", "times": ["19:00"]}
            ],
        }
        path = tmp_path / "kb.json"
        path.write_text(json.dumps(data))
        with pytest.raises(KbSchemaError):
            KnowledgeBase.load(path)


class TestInvoke:
    def test_result_name_matches_invocation(self, kb):
        inv = ApiInvocation("find_movies", (("name.genre", "action"),))
        result = invoke(inv, kb, make_ctx())
        assert result.name == "find_movies"
        assert result.values("name.movie") == ("John Wick", "Jack Ryan")

    def test_empty_match_yields_sentinel(self, kb):
        inv = ApiInvocation("find_movies", (("name.genre", "western"),))
        result = invoke(inv, kb, make_ctx())
        assert result.values("name.movie") == (EMPTY_MATCH,)

    def test_unknown_api_becomes_error_result(self, kb):
        inv = ApiInvocation("order_popcorn", ())
        result = _execute_result(inv, kb)
        assert result.name == "order_popcorn"
        assert result.values("error")
        assert "unknown" in result.values("error")[0].lower()

    def test_missing_required_arg_becomes_error_result(self, kb):
        inv = ApiInvocation("find_theaters", ())  # location is required
        result = _execute_result(inv, kb)
        assert "location" in result.values("error")[0]

    def test_duplicate_arg_becomes_error_result(self, kb):
        inv = ApiInvocation(
            "find_theaters", (("location", "Mountain View"), ("location", "Mountain View"))
        )
        result = _execute_result(inv, kb)
        assert "location" in result.values("error")[0]

    def test_unknown_args_are_ignored(self, kb):
        inv = ApiInvocation(
            "book_tickets",
            (
                ("name.movie", "John Wick"),
                ("name.theater", "AMC 20"),
                ("date", "2020-11-05"),
                ("time.showing", "19:00"),
                ("num.tickets", "2"),
                (EVENING_FILTER_ARG, EVENING_START),
            ),
        )
        result = invoke(inv, kb, make_ctx())
        assert result.values("status") == ("success",)
        assert result.values("ref.id")[0].startswith("BK-")


class TestAdapterExecute:
    def test_returns_resolved_invocation_and_result(self, kb):
        adapter = ApiAdapter(kb, make_ctx())
        raw = ApiInvocation(
            "find_showtimes",
            (
                ("location", "nearby"),
                ("name.movie", "John Wick"),
                ("name.theater", "AMC 20"),
                ("date", "tonight"),
            ),
        )
        resolved, result = adapter.execute(raw)
        assert resolved.arg("location") == "Mountain View"
        assert resolved.arg("date") == "2020-11-05"
        assert resolved.arg(EVENING_FILTER_ARG) == EVENING_START
        assert result.name == "find_showtimes"
        assert result.values("time.showing") == ("19:00", "21:45")

    def test_error_keeps_flowing_as_result(self, kb):
        adapter = ApiAdapter(kb, make_ctx())
        resolved, result = adapter.execute(ApiInvocation("no_such_api", ()))
        assert result.name == "no_such_api"
        assert result.values("error")

    def test_ledger_written_when_configured(self, tmp_path):
        from dialogkit.service import DEFAULT_KB_PATH

        ledger = tmp_path / "bookings.jsonl"
        kb = KnowledgeBase.load(DEFAULT_KB_PATH)
        kb.ledger_path = ledger
        kb.book("John Wick", "AMC 20", "2020-11-05", "19:00", "2")
        kb.book("John Wick", "AMC 20", "2020-11-05", "21:45", "4")
        lines = ledger.read_text().splitlines()
        assert len(lines) == 2
        entry = json.loads(lines[0])
        assert entry["ref_id"].startswith("BK-")
        assert entry["movie"] == "John Wick"


def _execute_result(inv, kb):
    _, result = ApiAdapter(kb, make_ctx()).execute(inv)
    return result
