"""HTTP service: session lifecycle, error envelopes, KB views, config."""

from __future__ import annotations

import json
from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from dialogkit import Dialog, generate_pairs
from dialogkit.corpus import dialog_from_dict
from dialogkit.service import (
    RemoteBackend,
    RemoteBackendConfig,
    ServiceConfig,
    SessionStore,
    create_app,
    load_config,
)

FIXED_CLOCK = "2020-11-05T10:00:00"

BOOKING_TURNS = [
    "Can you help me book a movie ticket?",
    "I'd like to see John Wick.",
    "Are there any theaters nearby?",
    "Let's do AMC 20 tonight.",
    "7 pm works. Two tickets please.",
    "Yes, please book it.",
    "Great, thanks!",
]


@pytest.fixture()
def client():
    app = create_app(ServiceConfig(fixed_clock=FIXED_CLOCK))
    with TestClient(app) as test_client:
        yield test_client


def create_session(client, **body) -> str:
    response = client.post("/v1/sessions", json=body or None)
    assert response.status_code == 201
    return response.json()["session_id"]


class TestSessionLifecycle:
    def test_healthz(self, client):
        response = client.get("/v1/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_create_session_returns_id(self, client):
        session_id = create_session(client)
        assert isinstance(session_id, str) and session_id

    def test_fresh_transcript_is_empty(self, client):
        session_id = create_session(client)
        response = client.get(f"/v1/sessions/{session_id}/transcript")
        assert response.status_code == 200
        assert response.json() == {"events": [], "pairs": []}

    def test_first_turn_response_shape(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/v1/sessions/{session_id}/utterance",
            json={"text": "Can you help me book a movie ticket?"},
        )
        assert response.status_code == 200
        body = response.json()
        assert body == {
            "agent_text": "Sure. I can help you with that. What kind of movies are you interested in?",
            "api_trace": [],
            "truncated": False,
        }

    def test_full_booking_conversation(self, client):
        session_id = create_session(client)
        outcomes = []
        for text in BOOKING_TURNS:
            response = client.post(
                f"/v1/sessions/{session_id}/utterance", json={"text": text}
            )
            assert response.status_code == 200, response.text
            outcomes.append(response.json())

        theater_turn = outcomes[2]
        assert [entry["name"] for entry in theater_turn["api_trace"]] == ["find_theaters"]
        args = {a["name"]: a["value"] for a in theater_turn["api_trace"][0]["args"]}
        assert args == {"location": "Mountain View", "name.movie": "John Wick"}
        results = {
            r["name"]: r["values"] for r in theater_turn["api_trace"][0]["result"]
        }
        assert "AMC 20" in results["name.theater"]

        showtime_turn = outcomes[3]
        assert [e["name"] for e in showtime_turn["api_trace"]] == ["find_showtimes"]
        showtime_args = {a["name"]: a["value"] for a in showtime_turn["api_trace"][0]["args"]}
        assert showtime_args["date"] == "2020-11-05"
        assert showtime_args["time.after"] == "18:00"
        assert "19:00" in showtime_turn["agent_text"]

        booking_turn = outcomes[5]
        assert [e["name"] for e in booking_turn["api_trace"]] == ["book_tickets"]
        booking_args = {a["name"]: a["value"] for a in booking_turn["api_trace"][0]["args"]}
        assert booking_args["num.tickets"] == "2"
        assert "BK-0001" in booking_turn["agent_text"]

        assert outcomes[6]["agent_text"] == "You are all set. Enjoy the show!"

    def test_transcript_keeps_raw_phrases_and_matching_pairs(self, client):
        session_id = create_session(client)
        for text in BOOKING_TURNS[:4]:
            assert (
                client.post(
                    f"/v1/sessions/{session_id}/utterance", json={"text": text}
                ).status_code
                == 200
            )
        body = client.get(f"/v1/sessions/{session_id}/transcript").json()
        invocations = [e for e in body["events"] if e["kind"] == "call"]
        theater_call = next(e for e in invocations if e["name"] == "find_theaters")
        raw_args = dict(theater_call["args"])
        assert raw_args["location"] == "nearby"

        rebuilt = dialog_from_dict({"id": session_id, "events": body["events"]})
        expected_pairs = [
            {"input": p.input, "target": p.target, "exchange_index": p.exchange_index}
            for p in generate_pairs(rebuilt)
        ]
        assert body["pairs"] == expected_pairs
        assert len(body["pairs"]) >= 3

    def test_session_default_location_override(self, client):
        session_id = create_session(client, default_location="Boston")
        client.post(
            f"/v1/sessions/{session_id}/utterance",
            json={"text": "I'd like to see John Wick."},
        )
        response = client.post(
            f"/v1/sessions/{session_id}/utterance",
            json={"text": "Are there any theaters nearby?"},
        )
        trace = response.json()["api_trace"]
        args = {a["name"]: a["value"] for a in trace[0]["args"]}
        assert args["location"] == "Boston"

    def test_sessions_are_isolated(self, client):
        first = create_session(client)
        second = create_session(client)
        client.post(f"/v1/sessions/{first}/utterance", json={"text": "Hello there."})
        body = client.get(f"/v1/sessions/{second}/transcript").json()
        assert body["events"] == []


class TestErrorEnvelopes:
    def test_unknown_session_turn_404(self, client):
        response = client.post("/v1/sessions/nope/utterance", json={"text": "hi"})
        assert response.status_code == 404
        body = response.json()
        assert body["code"] == "SessionNotFound"
        assert set(body) == {"code", "message", "detail"}

    def test_unknown_session_transcript_404(self, client):
        response = client.get("/v1/sessions/nope/transcript")
        assert response.status_code == 404
        assert response.json()["code"] == "SessionNotFound"

    def test_missing_text_field_422(self, client):
        session_id = create_session(client)
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"txt": "hi"})
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "ValidationError"
        assert isinstance(body["detail"], list)

    def test_blank_text_422(self, client):
        session_id = create_session(client)
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"text": "   "})
        assert response.status_code == 422
        assert response.json()["code"] == "InvalidText"

    def test_reserved_literal_422(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/v1/sessions/{session_id}/utterance", json={"text": "hello <PN>world"}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "ReservedLiteral"
        assert body["detail"] == "<PN>"

    def test_oversized_first_turn_413(self, client):
        session_id = create_session(client)
        response = client.post(
            f"/v1/sessions/{session_id}/utterance",
            json={"text": " ".join(["word"] * 1100)},
        )
        assert response.status_code == 413
        assert response.json()["code"] == "PreContextOverflow"

    def test_busy_session_409(self, client):
        session_id = create_session(client)
        session = client.app.state.store.get(session_id)
        assert session._lock.acquire(blocking=False)
        try:
            response = client.post(
                f"/v1/sessions/{session_id}/utterance", json={"text": "hi"}
            )
            assert response.status_code == 409
            assert response.json()["code"] == "SessionBusy"
        finally:
            session._lock.release()

    def test_loop_cap_500(self, client):
        session_id = create_session(client)
        session = client.app.state.store.get(session_id)
        session.backend = SimpleNamespace(
            predict=lambda text: "<PN>find_movies<PAN>name.genre<PAV>action"
        )
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"text": "hi"})
        assert response.status_code == 500
        assert response.json()["code"] == "LoopCapExceeded"

    def test_malformed_prediction_500(self, client):
        session_id = create_session(client)
        session = client.app.state.store.get(session_id)
        session.backend = SimpleNamespace(predict=lambda text: "<PAV>orphaned value")
        response = client.post(f"/v1/sessions/{session_id}/utterance", json={"text": "hi"})
        assert response.status_code == 500
        body = response.json()
        assert body["code"] == "MalformedPrediction"
        assert body["detail"] == "<PAV>orphaned value"


class TestKbViews:
    def test_movies_filtered_by_genre(self, client):
        response = client.get("/v1/kb/movies", params={"genre": "action"})
        assert response.status_code == 200
        movies = response.json()["movies"]
        titles = [m["title"] for m in movies]
        assert "John Wick" in titles
        assert all("action" in m["genres"] for m in movies)

    def test_movies_unfiltered_lists_catalog(self, client):
        everything = client.get("/v1/kb/movies").json()["movies"]
        action_only = client.get("/v1/kb/movies", params={"genre": "action"}).json()["movies"]
        assert len(everything) >= len(action_only)

    def test_theaters_filtered_by_location_and_movie(self, client):
        response = client.get(
            "/v1/kb/theaters",
            params={"location": "Mountain View", "movie": "John Wick"},
        )
        names = [t["name"] for t in response.json()["theaters"]]
        assert "AMC 20" in names

    def test_showtimes_filtered(self, client):
        response = client.get(
            "/v1/kb/showtimes",
            params={"theater": "AMC 20", "movie": "John Wick", "date": "2020-11-05"},
        )
        shows = response.json()["showtimes"]
        assert len(shows) == 1
        assert shows[0]["times"] == ["13:00", "16:30", "19:00", "21:45"]

    def test_showtimes_unknown_theater_empty(self, client):
        response = client.get("/v1/kb/showtimes", params={"theater": "Nowhere Plex"})
        assert response.json()["showtimes"] == []


class TestStaticHosting:
    def test_static_dir_served_at_root(self, tmp_path):
        (tmp_path / "index.html").write_text("<!doctype html><title>chat</title>")
        app = create_app(
            ServiceConfig(fixed_clock=FIXED_CLOCK, static_dir=str(tmp_path))
        )
        with TestClient(app) as test_client:
            response = test_client.get("/")
            assert response.status_code == 200
            assert "chat" in response.text


class TestSessionStore:
    def test_expired_sessions_evicted(self):
        now = [0.0]
        store = SessionStore(ttl_seconds=10, clock=lambda: now[0])
        store.add(SimpleNamespace(session_id="s1"))
        assert len(store) == 1
        now[0] = 11.0
        assert store.get("s1") is None
        assert len(store) == 0

    def test_access_refreshes_ttl(self):
        now = [0.0]
        store = SessionStore(ttl_seconds=10, clock=lambda: now[0])
        store.add(SimpleNamespace(session_id="s1"))
        now[0] = 6.0
        assert store.get("s1") is not None
        now[0] = 12.0
        assert store.get("s1") is not None
        now[0] = 23.0
        assert store.get("s1") is None


class TestConfig:
    def test_defaults(self):
        config = ServiceConfig()
        assert config.bind == "127.0.0.1:8023"
        assert config.backend == "rule_based"
        assert config.session_ttl_seconds == 30 * 60

    def test_load_from_file_with_env_overrides(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(
            json.dumps(
                {
                    "bind": "0.0.0.0:9000",
                    "default_location": "Boston",
                    "fixed_clock": FIXED_CLOCK,
                    "session_ttl_seconds": 60,
                }
            )
        )
        config = load_config(path, env={})
        assert config.bind == "0.0.0.0:9000"
        assert config.default_location == "Boston"
        assert config.session_ttl_seconds == 60

        overridden = load_config(
            path, env={"DIALOGKIT_BIND": "127.0.0.1:9999", "DIALOGKIT_KB_PATH": "/tmp/kb.json"}
        )
        assert overridden.bind == "127.0.0.1:9999"
        assert overridden.kb_path == "/tmp/kb.json"

    def test_load_remote_section(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(
            json.dumps(
                {
                    "backend": "remote",
                    "remote": {"endpoint": "http://model.internal/predict", "timeout_ms": 500},
                }
            )
        )
        config = load_config(path, env={})
        assert config.backend == "remote"
        assert config.remote.endpoint == "http://model.internal/predict"
        assert config.remote.timeout_ms == 500

    def test_remote_backend_requires_endpoint(self):
        with pytest.raises(ValueError):
            ServiceConfig(backend="remote")

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            ServiceConfig(backend="psychic")

    def test_bad_endpoint_rejected(self):
        with pytest.raises(ValueError):
            RemoteBackendConfig(endpoint="ftp://model/predict")

    def test_nonpositive_timeout_rejected(self):
        with pytest.raises(ValueError):
            RemoteBackendConfig(endpoint="http://model/predict", timeout_ms=0)

    def test_bad_clock_rejected(self):
        with pytest.raises(ValueError):
            ServiceConfig(fixed_clock="noon-ish")

    def test_nonpositive_ttl_rejected(self):
        with pytest.raises(ValueError):
            ServiceConfig(session_ttl_seconds=0)


class TestRemoteBackend:
    def test_predict_posts_input_and_reads_prediction(self):
        backend = RemoteBackend(RemoteBackendConfig(endpoint="http://model/predict"))
        seen = {}

        class StubResponse:
            def raise_for_status(self):
                pass

            def json(self):
                return {"prediction": "<A>stubbed reply"}

        def post(url, json):
            seen["url"] = url
            seen["json"] = json
            return StubResponse()

        backend._client = SimpleNamespace(post=post)
        assert backend.predict("<U>hi") == "<A>stubbed reply"
        assert seen == {"url": "http://model/predict", "json": {"input": "<U>hi"}}
