"""HTTP JSON service hosting live dialog sessions plus KB fixture views.

Non-2xx responses always carry the envelope {"code", "message", "detail"}.
Sessions are serialized per id (a concurrent turn gets 409), evicted after
a TTL of inactivity, and logged one JSON object per turn.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import corpus
from .adapter import ApiAdapter, KnowledgeBase, ResolutionContext
from .core import Dialog
from .pairs import generate_pairs
from .policy import RuleBasedBackend
from .runtime import (
    DialogSession,
    LengthPolicy,
    LoopCapExceeded,
    MalformedPrediction,
    PreContextOverflow,
    ReservedLiteralError,
    SessionBusy,
    TurnOutcome,
)

logger = logging.getLogger("dialogkit.service")

DEFAULT_KB_PATH = Path(__file__).parent / "data" / "kb_default.json"
DEFAULT_TTL_SECONDS = 30 * 60

ENV_BIND = "DIALOGKIT_BIND"
ENV_KB_PATH = "DIALOGKIT_KB_PATH"


@dataclass(frozen=True)
class RemoteBackendConfig:
    endpoint: str
    timeout_ms: int = 30000

    def __post_init__(self):
        if not (self.endpoint.startswith("http://") or self.endpoint.startswith("https://")):
            raise ValueError(f"remote backend endpoint must be an http(s) URL: {self.endpoint!r}")
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class ServiceConfig:
    bind: str = "127.0.0.1:8023"
    kb_path: str = str(DEFAULT_KB_PATH)
    backend: str = "rule_based"
    remote: RemoteBackendConfig | None = None
    default_location: str = "Mountain View"
    fixed_clock: str | None = None
    session_ttl_seconds: int = DEFAULT_TTL_SECONDS
    static_dir: str | None = None

    def __post_init__(self):
        if self.backend not in ("rule_based", "remote"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "remote" and self.remote is None:
            raise ValueError("remote backend requires an endpoint configuration")
        if self.session_ttl_seconds <= 0:
            raise ValueError("session TTL must be positive")
        if self.fixed_clock is not None:
            dt.datetime.fromisoformat(self.fixed_clock)

    def clock_anchor(self) -> dt.datetime:
        if self.fixed_clock is not None:
            return dt.datetime.fromisoformat(self.fixed_clock)
        return dt.datetime.now(dt.timezone.utc)


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Read the JSON config file and apply environment overrides."""
    import os

    env = dict(os.environ if env is None else env)
    data: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    remote = None
    if "remote" in data and data["remote"] is not None:
        remote = RemoteBackendConfig(
            endpoint=data["remote"]["endpoint"],
            timeout_ms=int(data["remote"].get("timeout_ms", 30000)),
        )
    config = ServiceConfig(
        bind=env.get(ENV_BIND) or data.get("bind", "127.0.0.1:8023"),
        kb_path=env.get(ENV_KB_PATH) or data.get("kb_path", str(DEFAULT_KB_PATH)),
        backend=data.get("backend", "rule_based"),
        remote=remote,
        default_location=data.get("default_location", "Mountain View"),
        fixed_clock=data.get("fixed_clock"),
        session_ttl_seconds=int(data.get("session_ttl_seconds", DEFAULT_TTL_SECONDS)),
        static_dir=data.get("static_dir"),
    )
    return config


class RemoteBackend:
    """Calls a remote model endpoint: POST {"input": ...} -> {"prediction": ...}."""

    def __init__(self, config: RemoteBackendConfig):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout_ms / 1000.0)

    def predict(self, input_text: str) -> str:
        response = self._client.post(self.config.endpoint, json={"input": input_text})
        response.raise_for_status()
        return response.json()["prediction"]


@dataclass
class _Entry:
    session: DialogSession
    last_used: float


class SessionStore:
    """TTL-evicting map of session id to DialogSession."""

    def __init__(self, ttl_seconds: float, clock=time.monotonic):
        self.ttl = ttl_seconds
        self._clock = clock
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def _sweep(self) -> None:
        now = self._clock()
        dead = [sid for sid, e in self._entries.items() if now - e.last_used > self.ttl]
        for sid in dead:
            del self._entries[sid]

    def add(self, session: DialogSession) -> None:
        with self._lock:
            self._sweep()
            self._entries[session.session_id] = _Entry(session, self._clock())

    def get(self, session_id: str) -> DialogSession | None:
        with self._lock:
            self._sweep()
            entry = self._entries.get(session_id)
            if entry is None:
                return None
            entry.last_used = self._clock()
            return entry.session

    def __len__(self) -> int:
        with self._lock:
            self._sweep()
            return len(self._entries)


class SessionBody(BaseModel):
    default_location: str | None = None


class UtteranceBody(BaseModel):
    text: str


def _envelope(status: int, code: str, message: str, detail: object = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _trace_json(outcome: TurnOutcome) -> list[dict]:
    trace = []
    for entry in outcome.trace:
        trace.append(
            {
                "name": entry.invocation.name,
                "args": [{"name": n, "value": v} for n, v in entry.invocation.args],
                "result": [
                    {"name": n, "values": list(values)} for n, values in entry.result.args
                ],
            }
        )
    return trace


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    kb = KnowledgeBase.load(config.kb_path)
    if config.backend == "remote":
        backend = RemoteBackend(config.remote)
    else:
        backend = RuleBasedBackend(kb)
    store = SessionStore(config.session_ttl_seconds)
    policy = LengthPolicy()

    app = FastAPI(title="dialog service", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.kb = kb
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _envelope(422, "ValidationError", "request body failed validation", exc.errors())

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: SessionBody | None = None):
        location = (body.default_location if body else None) or config.default_location
        ctx = ResolutionContext(
            clock_anchor=config.clock_anchor(),
            default_location=location,
            timezone="UTC",
        )
        session = DialogSession(
            backend=backend,
            adapter=ApiAdapter(kb=kb, ctx=ctx),
            policy=policy,
        )
        store.add(session)
        return {"session_id": session.session_id}

    @app.post("/v1/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody):
        session = store.get(session_id)
        if session is None:
            return _envelope(404, "SessionNotFound", f"no session {session_id}")
        started = time.monotonic()
        try:
            outcome = session.submit_utterance(body.text)
        except SessionBusy as exc:
            return _envelope(409, "SessionBusy", str(exc))
        except ReservedLiteralError as exc:
            return _envelope(422, "ReservedLiteral", str(exc), exc.literal)
        except ValueError as exc:
            return _envelope(422, "InvalidText", str(exc))
        except PreContextOverflow as exc:
            return _envelope(413, "PreContextOverflow", str(exc))
        except LoopCapExceeded as exc:
            _log_turn(session_id, started, None, error="LoopCapExceeded")
            return _envelope(500, "LoopCapExceeded", str(exc))
        except MalformedPrediction as exc:
            _log_turn(session_id, started, None, error="MalformedPrediction")
            return _envelope(500, "MalformedPrediction", str(exc), exc.raw_text)
        _log_turn(session_id, started, outcome)
        return {
            "agent_text": outcome.agent_text,
            "api_trace": _trace_json(outcome),
            "truncated": outcome.truncated,
        }

    @app.get("/v1/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _envelope(404, "SessionNotFound", f"no session {session_id}")
        dialog = Dialog(session_id, tuple(session.transcript()))
        return {
            "events": corpus.dialog_to_dict(dialog)["events"],
            "pairs": [
                {"input": p.input, "target": p.target, "exchange_index": p.exchange_index}
                for p in generate_pairs(dialog)
            ],
        }

    @app.get("/v1/kb/movies")
    def kb_movies(genre: str | None = None, location: str | None = None):
        titles = kb.find_movies(location, genre)
        movies = [m for m in kb.movies if m["title"] in titles]
        return {"movies": movies}

    @app.get("/v1/kb/theaters")
    def kb_theaters(location: str | None = None, movie: str | None = None):
        theaters = kb.theaters
        if location is not None or movie is not None:
            names = kb.find_theaters(location or "", movie) if location else None
            theaters = [
                t
                for t in kb.theaters
                if (names is None or t["name"] in names)
                and (
                    movie is None
                    or any(movie.strip().lower() == m.lower() for m in t.get("movie_titles", []))
                )
            ]
        return {"theaters": theaters}

    @app.get("/v1/kb/showtimes")
    def kb_showtimes(theater: str | None = None, movie: str | None = None, date: str | None = None):
        shows = [
            s
            for s in kb.showtimes
            if (theater is None or s["theater"].lower() == theater.strip().lower())
            and (movie is None or s["movie"].lower() == movie.strip().lower())
            and (date is None or s["date"] == date.strip())
        ]
        return {"showtimes": shows}

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app


def _log_turn(
    session_id: str, started: float, outcome: TurnOutcome | None, error: str | None = None
) -> None:
    record = {
        "event": "turn",
        "session_id": session_id,
        "latency_ms": round((time.monotonic() - started) * 1000.0, 3),
        "api_calls": [e.invocation.name for e in outcome.trace] if outcome else [],
        "truncated": outcome.truncated if outcome else None,
        "outcome": error or "ok",
    }
    logger.info(json.dumps(record, sort_keys=True))


def run(config: ServiceConfig) -> None:
    import uvicorn

    host, _, port = config.bind.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or "8023"))
