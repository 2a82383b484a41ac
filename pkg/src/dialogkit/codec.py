"""Serializer and parser for the unified text-to-text token format.

The wire format is nine marker literals followed by verbatim payload text,
with no separators inserted. The parser is single-pass and linear; it trims
leading/trailing whitespace from payloads (presentation whitespace around
markers is not meaningful) and reports error positions as byte offsets.

See format.md at the repository root for the bit-exact contract.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ApiInvocation, ApiResult, DialogEvent, Side, Speaker, Utterance, classify_event
from .tokens import CONTEXT_LITERAL, MARKER_RE, TokenKind, lookup_kind


class ParseError(ValueError):
    """A wire-format violation. position is the byte offset of the offending token."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"parse error at byte {position}: {reason}")
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class Token:
    """One lexed marker with its payload (text up to the next marker)."""

    kind: TokenKind
    payload: str
    offset: int  # byte offset of the marker literal


TokenStream = list[Token]


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8"))


def serialize_event(event: DialogEvent) -> str:
    """Render one event in the token format, payloads verbatim, no separators."""
    if isinstance(event, Utterance):
        kind = TokenKind.USER if event.speaker is Speaker.USER else TokenKind.AGENT
        return kind.literal + event.text
    if isinstance(event, ApiInvocation):
        parts = [TokenKind.PROGRAM_NAME.literal + event.name]
        for arg_name, value in event.args:
            parts.append(TokenKind.PROGRAM_ARG_NAME.literal + arg_name)
            parts.append(TokenKind.PROGRAM_ARG_VALUE.literal + value)
        return "".join(parts)
    if isinstance(event, ApiResult):
        parts = [TokenKind.PROGRAM_RESPONSE.literal + event.name]
        for arg_name, values in event.args:
            parts.append(TokenKind.PROGRAM_RESPONSE_ARG_NAME.literal + arg_name)
            for value in values:
                parts.append(TokenKind.PROGRAM_RESPONSE_ARG_VALUE.literal + value)
        return "".join(parts)
    raise TypeError(f"not a DialogEvent: {event!r}")


def serialize_events(events) -> str:
    return "".join(serialize_event(e) for e in events)


def tokenize(text: str) -> TokenStream:
    """Lex *text* into a marker/payload stream.

    Raises ParseError for non-whitespace text before the first marker and
    for unknown uppercase marker candidates.
    """
    raw: list[tuple[TokenKind, int, int, int]] = []  # kind, byte offset, payload char span
    running_bytes = 0
    prev_end = 0  # char index just past the previous marker
    for match in MARKER_RE.finditer(text):
        segment = text[prev_end : match.start()]
        if not raw and segment.strip():
            lead = len(segment) - len(segment.lstrip())
            raise ParseError(running_bytes + len(segment[:lead].encode("utf-8")), "text before the first token")
        running_bytes += len(segment.encode("utf-8"))
        kind = lookup_kind(match.group(1))
        if kind is None:
            raise ParseError(running_bytes, f"unknown marker {match.group(0)!r}")
        raw.append((kind, running_bytes, match.end(), len(text)))
        if len(raw) > 1:
            prev = raw[-2]
            raw[-2] = (prev[0], prev[1], prev[2], match.start())
        running_bytes += match.end() - match.start()  # marker literals are ASCII
        prev_end = match.end()
    if not raw:
        if text.strip():
            lead = len(text) - len(text.lstrip())
            raise ParseError(_byte_offset(text, lead), "text before the first token")
        return []
    return [
        Token(kind=kind, payload=text[pstart:pend].strip(), offset=offset)
        for kind, offset, pstart, pend in raw
    ]


def _wrap_value_error(exc: ValueError, offset: int) -> ParseError:
    return ParseError(offset, str(exc))


def parse_tokens(tokens: TokenStream) -> list[DialogEvent]:
    """Assemble a lexed stream into events, enforcing the token grammar."""
    events: list[DialogEvent] = []
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        kind = tok.kind
        if kind in (TokenKind.USER, TokenKind.AGENT):
            if not tok.payload:
                raise ParseError(tok.offset, "empty utterance text")
            speaker = Speaker.USER if kind is TokenKind.USER else Speaker.AGENT
            try:
                events.append(Utterance(speaker, tok.payload))
            except ValueError as exc:
                raise _wrap_value_error(exc, tok.offset) from exc
            i += 1
        elif kind is TokenKind.PROGRAM_NAME:
            if not tok.payload:
                raise ParseError(tok.offset, "empty API name")
            args: list[tuple[str, str]] = []
            i += 1
            while i < n and tokens[i].kind is TokenKind.PROGRAM_ARG_NAME:
                arg_tok = tokens[i]
                if not arg_tok.payload:
                    raise ParseError(arg_tok.offset, "empty argument name")
                i += 1
                if i >= n or tokens[i].kind is not TokenKind.PROGRAM_ARG_VALUE:
                    raise ParseError(arg_tok.offset, "PAN without a following PAV")
                val_tok = tokens[i]
                if not val_tok.payload:
                    raise ParseError(val_tok.offset, "empty argument value")
                args.append((arg_tok.payload, val_tok.payload))
                i += 1
            try:
                events.append(ApiInvocation(tok.payload, tuple(args)))
            except ValueError as exc:
                raise _wrap_value_error(exc, tok.offset) from exc
        elif kind is TokenKind.PROGRAM_RESPONSE:
            if not tok.payload:
                raise ParseError(tok.offset, "empty API name")
            res_args: list[tuple[str, tuple[str, ...]]] = []
            i += 1
            while i < n and tokens[i].kind is TokenKind.PROGRAM_RESPONSE_ARG_NAME:
                arg_tok = tokens[i]
                if not arg_tok.payload:
                    raise ParseError(arg_tok.offset, "empty response argument name")
                i += 1
                values: list[str] = []
                while i < n and tokens[i].kind is TokenKind.PROGRAM_RESPONSE_ARG_VALUE:
                    val_tok = tokens[i]
                    if not val_tok.payload:
                        raise ParseError(val_tok.offset, "empty response argument value")
                    values.append(val_tok.payload)
                    i += 1
                if not values:
                    raise ParseError(arg_tok.offset, "PRAN without a following PRAV")
                res_args.append((arg_tok.payload, tuple(values)))
            try:
                events.append(ApiResult(tok.payload, tuple(res_args)))
            except ValueError as exc:
                raise _wrap_value_error(exc, tok.offset) from exc
        elif kind is TokenKind.CONTEXT:
            raise ParseError(tok.offset, "context token not allowed in an event stream")
        elif kind is TokenKind.PROGRAM_ARG_NAME:
            raise ParseError(tok.offset, "PAN without preceding PN in the current segment")
        elif kind is TokenKind.PROGRAM_ARG_VALUE:
            raise ParseError(tok.offset, "PAV without preceding PAN")
        elif kind is TokenKind.PROGRAM_RESPONSE_ARG_NAME:
            raise ParseError(tok.offset, "PRAN without preceding PR in the current segment")
        elif kind is TokenKind.PROGRAM_RESPONSE_ARG_VALUE:
            raise ParseError(tok.offset, "PRAV without preceding PRAN")
        else:  # pragma: no cover - exhaustive over TokenKind
            raise ParseError(tok.offset, f"unhandled token kind {kind}")
    return events


def parse_stream(text: str) -> list[DialogEvent]:
    """Parse a serialized event stream back into events.

    Serializing the returned events and concatenating reproduces *text*
    modulo whitespace trimmed at token boundaries.
    """
    return parse_tokens(tokenize(text))


def split_input(text: str) -> tuple[str, str | None]:
    """Split a model input at the context separator.

    Returns (recent, context); context is None when no separator is present.
    A model input carries at most one separator.
    """
    first = text.find(CONTEXT_LITERAL)
    if first < 0:
        return text, None
    rest = text[first + len(CONTEXT_LITERAL) :]
    second = rest.find(CONTEXT_LITERAL)
    if second >= 0:
        raise ParseError(
            _byte_offset(text, first + len(CONTEXT_LITERAL) + second),
            "more than one context token in model input",
        )
    return text[:first], rest


@dataclass(frozen=True)
class Verbal:
    """A prediction made purely of agent utterances."""

    utterances: tuple[Utterance, ...]


@dataclass(frozen=True)
class Calls:
    """A prediction made purely of API invocations (one or more)."""

    invocations: tuple[ApiInvocation, ...]


@dataclass(frozen=True)
class Malformed:
    """A prediction the runtime cannot act on."""

    reason: str
    error: ParseError | None = None


PredictionKind = Verbal | Calls | Malformed


def classify_prediction(text: str) -> PredictionKind:
    """Classify raw model output: all agent utterances, all calls, or malformed."""
    try:
        events = parse_stream(text)
    except ParseError as exc:
        return Malformed(reason=exc.reason, error=exc)
    if not events:
        return Malformed(reason="empty prediction")
    if any(classify_event(e) is Side.INPUT for e in events):
        return Malformed(reason="input-side event in prediction")
    utterances = [e for e in events if isinstance(e, Utterance)]
    invocations = [e for e in events if isinstance(e, ApiInvocation)]
    if utterances and invocations:
        return Malformed(reason="mixed verbal and call prediction")
    if invocations:
        return Calls(tuple(invocations))
    return Verbal(tuple(utterances))
