"""Turn a dialog into ordered (input, target) training pairs.

Events are walked left to right. Consecutive input-side events (user
utterances, API results) accumulate into the pending input; consecutive
target-side events (agent utterances, API invocations) accumulate into the
pending target. When a target is pending and an input-side event arrives
(or the dialog ends), a pair is emitted and both pending runs move into the
conversation context. The context separator is omitted while the context is
empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Dialog, DialogEvent, Side, classify_event
from .codec import serialize_events
from .tokens import CONTEXT_LITERAL


@dataclass(frozen=True)
class TrainingPair:
    """One (input, target) string pair in the token format.

    exchange_index counts completed input/target cycles before this pair.
    """

    input: str
    target: str
    exchange_index: int


@dataclass
class PairBatch:
    """Pairs for one dialog plus any trailing input-side events that
    produced no pair (a dangling input, reported rather than raised)."""

    pairs: list[TrainingPair] = field(default_factory=list)
    dangling_events: list[DialogEvent] = field(default_factory=list)

    @property
    def has_dangling_input(self) -> bool:
        return bool(self.dangling_events)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def build_input(pending_serialized: str, context_serialized: str) -> str:
    """Join the recent-turn segment with the serialized prior history."""
    if context_serialized:
        return pending_serialized + CONTEXT_LITERAL + context_serialized
    return pending_serialized


def generate_pairs(dialog: Dialog) -> PairBatch:
    """Emit one pair per maximal target-side run, in order."""
    batch = PairBatch()
    context = ""
    pending_input: list[DialogEvent] = []
    pending_target: list[DialogEvent] = []

    def emit() -> None:
        nonlocal context
        input_serialized = serialize_events(pending_input)
        target_serialized = serialize_events(pending_target)
        batch.pairs.append(
            TrainingPair(
                input=build_input(input_serialized, context),
                target=target_serialized,
                exchange_index=len(batch.pairs),
            )
        )
        context = context + input_serialized + target_serialized
        pending_input.clear()
        pending_target.clear()

    for event in dialog.events:
        if classify_event(event) is Side.INPUT:
            if pending_target:
                emit()
            pending_input.append(event)
        else:
            pending_target.append(event)
    if pending_target:
        emit()
    elif pending_input:
        batch.dangling_events = list(pending_input)
    return batch
