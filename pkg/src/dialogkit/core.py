"""Domain types for structured dialogs: speakers, events, API calls, dialogs.

All types are immutable values; constructors normalize and validate so that
any object you can hold satisfies its invariants. Boundary whitespace is not
representable in the wire format, so text fields are stripped at
construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Union

from .tokens import contains_marker_candidate, find_reserved_literal

API_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class Speaker(IntEnum):
    """The two conversation roles. USER < AGENT for deterministic ordering."""

    USER = 0
    AGENT = 1


class Side(Enum):
    """Which half of a training pair an event belongs to."""

    INPUT = "input"
    TARGET = "target"


def _check_payload_text(text: str, what: str) -> str:
    text = text.strip()
    if not text:
        raise ValueError(f"{what} must be non-empty after trimming")
    lit = find_reserved_literal(text)
    if lit is not None:
        raise ValueError(f"{what} contains reserved literal {lit!r}")
    if contains_marker_candidate(text):
        raise ValueError(f"{what} contains a marker-like sequence")
    return text


@dataclass(frozen=True)
class Utterance:
    """One verbal turn by either speaker."""

    speaker: Speaker
    text: str

    def __post_init__(self):
        object.__setattr__(self, "speaker", Speaker(self.speaker))
        object.__setattr__(self, "text", _check_payload_text(self.text, "utterance text"))


@dataclass(frozen=True)
class ApiInvocation:
    """A structured API call: a name plus ordered (arg name, value) pairs.

    Duplicate arg names are representable (order preserved); the mock KB
    rejects them at invocation time.
    """

    name: str
    args: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        name = self.name.strip()
        if not API_NAME_RE.match(name):
            raise ValueError(f"invalid API name {self.name!r}")
        args = tuple(
            (_check_payload_text(a, "argument name"), _check_payload_text(v, f"value of {a!r}"))
            for a, v in self.args
        )
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", args)

    def arg(self, name: str) -> str | None:
        """First value for *name*, or None."""
        for arg_name, value in self.args:
            if arg_name == name:
                return value
        return None


@dataclass(frozen=True)
class ApiResult:
    """The multi-valued response to an ApiInvocation of the same name."""

    name: str
    args: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        name = self.name.strip()
        if not API_NAME_RE.match(name):
            raise ValueError(f"invalid API name {self.name!r}")
        args = []
        for arg_name, values in self.args:
            arg_name = _check_payload_text(arg_name, "response argument name")
            values = tuple(_check_payload_text(v, f"value of {arg_name!r}") for v in values)
            if not values:
                raise ValueError(f"response argument {arg_name!r} carries no values")
            args.append((arg_name, values))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "args", tuple(args))

    def values(self, name: str) -> tuple[str, ...]:
        for arg_name, vals in self.args:
            if arg_name == name:
                return vals
        return ()


DialogEvent = Union[Utterance, ApiInvocation, ApiResult]


def classify_event(event: DialogEvent) -> Side:
    """Input side: user utterances and API results. Target side: the rest."""
    if isinstance(event, Utterance):
        return Side.INPUT if event.speaker is Speaker.USER else Side.TARGET
    if isinstance(event, ApiResult):
        return Side.INPUT
    if isinstance(event, ApiInvocation):
        return Side.TARGET
    raise TypeError(f"not a DialogEvent: {event!r}")


def invalid_event_order(events: Iterable[DialogEvent]) -> str | None:
    """Single left-to-right scan for the result-follows-invocation rule.

    Returns a reason string for the first violation, or None if valid.
    """
    invoked: set[str] = set()
    for i, event in enumerate(events):
        if isinstance(event, ApiInvocation):
            invoked.add(event.name)
        elif isinstance(event, ApiResult) and event.name not in invoked:
            return f"event {i}: result for {event.name!r} has no preceding invocation"
    return None


@dataclass(frozen=True)
class Dialog:
    """An identified, ordered event sequence.

    entities carries annotated named-entity values from corpus ingestion;
    it is empty for synthetic dialogs and does not affect serialization.
    """

    id: str
    events: tuple[DialogEvent, ...]
    entities: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.id.strip():
            raise ValueError("dialog id must be non-empty")
        events = tuple(self.events)
        reason = invalid_event_order(events)
        if reason is not None:
            raise ValueError(f"dialog {self.id!r}: {reason}")
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "entities", tuple(self.entities))
