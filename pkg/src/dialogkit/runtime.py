"""Interaction lifecycle engine.

Maintains per-session dialog state, formats model inputs with the context
separator, classifies predictions, loops through API execution rounds, and
enforces the input/target length caps by dropping oldest context events.
"""

from __future__ import annotations

import datetime as dt
import re
import threading
import uuid
from dataclasses import dataclass, field
from typing import Protocol

from .adapter import ApiAdapter
from .codec import (
    Calls,
    Malformed,
    Verbal,
    classify_prediction,
    parse_stream,
    serialize_event,
    serialize_events,
    split_input,
)
from .core import ApiInvocation, ApiResult, DialogEvent, Speaker, Utterance
from .pairs import build_input
from .tokens import RESERVED_LITERALS, find_reserved_literal

DEFAULT_MAX_INPUT_TOKENS = 1024
DEFAULT_MAX_TARGET_TOKENS = 256
DEFAULT_API_LOOP_CAP = 4

_LITERAL_SPLIT_RE = re.compile("(" + "|".join(re.escape(lit) for lit in RESERVED_LITERALS) + ")")


class DialogRuntimeError(Exception):
    """Base class for lifecycle failures that leave the session intact."""


class LoopCapExceeded(DialogRuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"backend kept predicting API calls past the cap of {cap} rounds per turn")
        self.cap = cap


class MalformedPrediction(DialogRuntimeError):
    def __init__(self, reason: str, raw_text: str):
        super().__init__(f"backend produced a malformed prediction after retry: {reason}")
        self.reason = reason
        self.raw_text = raw_text


class PreContextOverflow(DialogRuntimeError):
    def __init__(self, needed: int, cap: int):
        super().__init__(f"segment before the context separator needs {needed} tokens, cap is {cap}")
        self.needed = needed
        self.cap = cap


class SessionBusy(DialogRuntimeError):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} already has a turn in flight")
        self.session_id = session_id


class ReservedLiteralError(DialogRuntimeError):
    def __init__(self, literal: str):
        super().__init__(f"utterance contains the reserved token literal {literal}")
        self.literal = literal


def count_tokens(text: str) -> int:
    """Whitespace token count where each reserved marker literal is one token."""
    total = 0
    for piece in _LITERAL_SPLIT_RE.split(text):
        if not piece:
            continue
        if piece in RESERVED_LITERALS:
            total += 1
        else:
            total += len(piece.split())
    return total


@dataclass(frozen=True)
class LengthPolicy:
    """Input/target budget; the counter strategy is named so a model backend
    can substitute its own tokenizer."""

    max_input_tokens: int = DEFAULT_MAX_INPUT_TOKENS
    max_target_tokens: int = DEFAULT_MAX_TARGET_TOKENS
    token_counter: str = "whitespace"

    def __post_init__(self):
        if self.max_input_tokens <= 0 or self.max_target_tokens <= 0:
            raise ValueError("length caps must be positive")
        if self.token_counter != "whitespace":
            raise ValueError(f"unknown token counter {self.token_counter!r}")

    def count(self, text: str) -> int:
        return count_tokens(text)


def truncate_input(input_text: str, policy: LengthPolicy) -> str:
    """Drop whole serialized events from the oldest end of the context until
    the input fits the cap.

    The segment before the context separator and the separator itself are
    never dropped; if they alone exceed the cap, PreContextOverflow is raised
    rather than silently cutting the recent turn.
    """
    if policy.count(input_text) <= policy.max_input_tokens:
        return input_text
    recent, context = split_input(input_text)
    protected = policy.count(recent) + (1 if context is not None else 0)
    if protected > policy.max_input_tokens:
        raise PreContextOverflow(protected, policy.max_input_tokens)
    if context is None:
        # No separator and still over budget: the whole input is protected.
        raise PreContextOverflow(policy.count(recent), policy.max_input_tokens)
    pieces = [serialize_event(event) for event in parse_stream(context)]
    budget = policy.max_input_tokens - protected
    counts = [policy.count(piece) for piece in pieces]
    while pieces and sum(counts) > budget:
        pieces.pop(0)
        counts.pop(0)
    return recent + "<C>" + "".join(pieces)


class AgentBackend(Protocol):
    """Text-in/text-out prediction interface; implementations may be the
    deterministic rule-based policy or a remote model endpoint."""

    def predict(self, input_text: str) -> str: ...


@dataclass(frozen=True)
class TraceEntry:
    """One executed API round: the resolved invocation and its result."""

    invocation: ApiInvocation
    result: ApiResult


@dataclass(frozen=True)
class TurnOutcome:
    agent_text: str
    trace: tuple[TraceEntry, ...]
    truncated: bool


@dataclass
class SessionState:
    """Full per-session history plus the cached serialized context.

    events always ends with pending_input_events; context_serialized equals
    the serialization of everything before them.
    """

    session_id: str
    clock_anchor: dt.datetime
    default_location: str
    events: list[DialogEvent] = field(default_factory=list)
    context_serialized: str = ""
    pending_input_events: list[DialogEvent] = field(default_factory=list)
    booking_refs: list[str] = field(default_factory=list)

    def committed_events(self) -> list[DialogEvent]:
        pending = len(self.pending_input_events)
        return self.events[: len(self.events) - pending] if pending else list(self.events)

    def check_coherence(self) -> None:
        expected = serialize_events(self.committed_events())
        if expected != self.context_serialized:
            raise AssertionError("context cache diverged from the event list")


class DialogSession:
    """Serialized access to one conversation: at most one turn in flight."""

    def __init__(
        self,
        backend: AgentBackend,
        adapter: ApiAdapter,
        session_id: str | None = None,
        policy: LengthPolicy | None = None,
        loop_cap: int = DEFAULT_API_LOOP_CAP,
    ):
        ctx = adapter.ctx
        self.state = SessionState(
            session_id=session_id or uuid.uuid4().hex,
            clock_anchor=ctx.clock_anchor,
            default_location=ctx.default_location,
        )
        self.backend = backend
        self.adapter = adapter
        self.policy = policy or LengthPolicy()
        self.loop_cap = loop_cap
        self._lock = threading.Lock()

    @property
    def session_id(self) -> str:
        return self.state.session_id

    def submit_utterance(self, text: str) -> TurnOutcome:
        if not self._lock.acquire(blocking=False):
            raise SessionBusy(self.state.session_id)
        try:
            return self._run_turn(text)
        finally:
            self._lock.release()

    def _run_turn(self, text: str) -> TurnOutcome:
        if not text.strip():
            raise ValueError("utterance text is empty")
        literal = find_reserved_literal(text)
        if literal is not None:
            raise ReservedLiteralError(literal)

        state = self.state
        utterance = Utterance(Speaker.USER, text)
        state.events.append(utterance)
        state.pending_input_events.append(utterance)

        trace: list[TraceEntry] = []
        truncated = False
        rounds = 0
        while True:
            input_text = build_input(
                serialize_events(state.pending_input_events), state.context_serialized
            )
            fitted = truncate_input(input_text, self.policy)
            truncated = truncated or fitted != input_text

            prediction = self._predict_with_retry(fitted)
            if isinstance(prediction, Verbal):
                self._commit(list(prediction.utterances))
                agent_text = "\n".join(u.text for u in prediction.utterances)
                state.check_coherence()
                return TurnOutcome(agent_text, tuple(trace), truncated)

            assert isinstance(prediction, Calls)
            if rounds >= self.loop_cap:
                raise LoopCapExceeded(self.loop_cap)
            rounds += 1
            # Predicted invocations go into the transcript before execution,
            # so an adapter failure mid-round still leaves replayable history.
            self._commit(list(prediction.invocations))
            results: list[DialogEvent] = []
            for invocation in prediction.invocations:
                resolved, result = self.adapter.execute(invocation)
                trace.append(TraceEntry(resolved, result))
                results.append(result)
                self._note_booking(result)
            state.events.extend(results)
            state.pending_input_events = results

    def _predict_with_retry(self, input_text: str) -> Verbal | Calls:
        raw = self.backend.predict(input_text)
        prediction = classify_prediction(raw)
        if isinstance(prediction, Malformed):
            raw = self.backend.predict(input_text)
            prediction = classify_prediction(raw)
            if isinstance(prediction, Malformed):
                raise MalformedPrediction(prediction.reason, raw)
        return prediction

    def _commit(self, target_events: list[DialogEvent]) -> None:
        """Fold the pending input plus one target run into the context."""
        state = self.state
        state.context_serialized += serialize_events(state.pending_input_events)
        state.context_serialized += serialize_events(target_events)
        state.events.extend(target_events)
        state.pending_input_events = []

    def _note_booking(self, result: ApiResult) -> None:
        if result.name != "book_tickets":
            return
        status = result.values("status")
        if status and status[0] == "success":
            self.state.booking_refs.extend(result.values("ref.id"))

    def transcript(self) -> list[DialogEvent]:
        return list(self.state.events)
