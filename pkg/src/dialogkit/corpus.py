"""Dataset ingestion, validation, statistics, subset sampling, and pair export.

Two on-disk schemas are understood:

* external: a JSON array of conversations, each with a conversation_id and
  an utterances list; utterance entries carry speaker ("user"/"assistant"),
  text, optional entity segments, and optional attached API calls (args and
  response as name/value records). API events attached to an utterance are
  ordered before it: the agent looks things up, then speaks.
* interchange: this package's own format, an object
  {"schema": "dialog-interchange", "version": 1, "dialogs": [...]} with
  explicitly tagged events.

ingest() auto-detects the schema. API names are normalized (lower-cased,
dashes to underscores) and mapped through an alias table so dataset
spellings like "find-movies" or "FIND_MOVIES" land on the canonical
vocabulary.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    API_NAME_RE,
    ApiInvocation,
    ApiResult,
    Dialog,
    DialogEvent,
    Speaker,
    Utterance,
)
from .pairs import generate_pairs

PUNCTUATION = ".,!?"

DEFAULT_ALIASES = {
    "find_movie": "find_movies",
    "find_theater": "find_theaters",
    "find_theatres": "find_theaters",
    "find_showtime": "find_showtimes",
    "book_ticket": "book_tickets",
}


class CorpusError(Exception):
    pass


class FileUnreadable(CorpusError):
    pass


class SchemaMismatch(CorpusError):
    """Raised with the JSON path of the first offending element."""

    def __init__(self, json_path: str, detail: str):
        super().__init__(f"at {json_path}: {detail}")
        self.json_path = json_path
        self.detail = detail


class SizeExceedsCorpus(CorpusError):
    def __init__(self, size: int, available: int):
        super().__init__(f"requested {size} dialogs but the corpus has {available}")
        self.size = size
        self.available = available


class UnencodableText(CorpusError):
    def __init__(self, dialog_id: str, detail: str):
        super().__init__(f"dialog {dialog_id}: {detail}")
        self.dialog_id = dialog_id


def normalize_api_name(name: str) -> str:
    return name.strip().lower().replace("-", "_")


def tokenize(text: str) -> list[str]:
    """Whitespace tokens with trailing . , ! ? peeled off as separate tokens."""
    tokens: list[str] = []
    for piece in text.split():
        peeled: list[str] = []
        while piece and piece[-1] in PUNCTUATION:
            peeled.append(piece[-1])
            piece = piece[:-1]
        if piece:
            tokens.append(piece)
        tokens.extend(reversed(peeled))
    return tokens


@dataclass(frozen=True)
class CorpusStats:
    dialog_count: int
    total_turns: int
    total_tokens: int
    unique_tokens: int
    avg_turns_per_dialog: float
    avg_tokens_per_turn: float
    unique_named_entities: int

    def to_dict(self) -> dict:
        return {
            "dialog_count": self.dialog_count,
            "total_turns": self.total_turns,
            "total_tokens": self.total_tokens,
            "unique_tokens": self.unique_tokens,
            "avg_turns_per_dialog": self.avg_turns_per_dialog,
            "avg_tokens_per_turn": self.avg_tokens_per_turn,
            "unique_named_entities": self.unique_named_entities,
        }

    def render_table(self) -> str:
        rows = [
            ("Dialogs", f"{self.dialog_count:,}"),
            ("Total turns", f"{self.total_turns:,}"),
            ("Unique tokens", f"{self.unique_tokens:,}"),
            ("Avg. turns per dialog", f"{self.avg_turns_per_dialog:.2f}"),
            ("Avg. tokens per turn", f"{self.avg_tokens_per_turn:.2f}"),
            ("Unique named entities", f"{self.unique_named_entities:,}"),
        ]
        width = max(len(label) for label, _ in rows)
        value_width = max(len(value) for _, value in rows)
        return "\n".join(f"{label:<{width}}  {value:>{value_width}}" for label, value in rows)


@dataclass(frozen=True)
class SubsetSpec:
    size: int
    seed: int
    method: str = "uniform-without-replacement"

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("subset size must be non-negative")
        if self.method != "uniform-without-replacement":
            raise ValueError(f"unknown sampling method {self.method!r}")


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"dialog_id": d, "reason": r} for d, r in self.rejected],
        }


@dataclass
class IngestResult:
    dialogs: list[Dialog]
    report: IngestReport
    # Original JSON object per accepted dialog id; ingestion is lossless.
    provenance: dict[str, object]


@dataclass
class ExportReport:
    pair_count: int
    dialog_count: int
    dangling_inputs: list[str]
    path: str
    format: str

    def to_dict(self) -> dict:
        return {
            "pair_count": self.pair_count,
            "dialog_count": self.dialog_count,
            "dangling_inputs": self.dangling_inputs,
            "path": self.path,
            "format": self.format,
        }


# -- external schema -------------------------------------------------------


def _require(condition: bool, json_path: str, detail: str) -> None:
    if not condition:
        raise SchemaMismatch(json_path, detail)


def _convert_external_conversation(conv: dict, index: int, aliases: dict[str, str]) -> Dialog:
    path = f"$[{index}]"
    _require(isinstance(conv, dict), path, "conversation must be an object")
    _require("conversation_id" in conv, path, "missing conversation_id")
    _require("utterances" in conv, path, "missing utterances")
    dialog_id = str(conv["conversation_id"])
    utterances = conv["utterances"]
    _require(isinstance(utterances, list), f"{path}.utterances", "must be an array")

    events: list[DialogEvent] = []
    entities: list[str] = []

    def note_entity(value: str) -> None:
        if value not in entities:
            entities.append(value)

    for u_index, entry in enumerate(utterances):
        u_path = f"{path}.utterances[{u_index}]"
        _require(isinstance(entry, dict), u_path, "utterance must be an object")
        _require("speaker" in entry, u_path, "missing speaker")
        _require("text" in entry, u_path, "missing text")
        speaker_label = str(entry["speaker"]).strip().lower()
        if speaker_label == "user":
            speaker = Speaker.USER
        elif speaker_label in ("assistant", "agent"):
            speaker = Speaker.AGENT
        else:
            raise SchemaMismatch(f"{u_path}.speaker", f"unknown speaker {entry['speaker']!r}")

        for a_index, call in enumerate(entry.get("apis", [])):
            a_path = f"{u_path}.apis[{a_index}]"
            _require(isinstance(call, dict), a_path, "api record must be an object")
            _require("name" in call, a_path, "missing api name")
            name = aliases.get(normalize_api_name(str(call["name"])), None) or normalize_api_name(
                str(call["name"])
            )
            if not API_NAME_RE.match(name):
                raise ValueError(f"api name {call['name']!r} is not mappable")
            args = []
            for record in call.get("args", []):
                args.append((str(record["arg_name"]), str(record["arg_value"])))
                note_entity(str(record["arg_value"]))
            events.append(ApiInvocation(name, tuple(args)))
            grouped: list[tuple[str, list[str]]] = []
            for record in call.get("response", []):
                key = str(record["response_name"])
                value = str(record["response_value"])
                note_entity(value)
                if grouped and grouped[-1][0] == key:
                    grouped[-1][1].append(value)
                else:
                    grouped.append((key, [value]))
            if grouped:
                events.append(ApiResult(name, tuple((k, tuple(v)) for k, v in grouped)))

        text = str(entry["text"])
        events.append(Utterance(speaker, text))
        for seg in entry.get("segments", []):
            note_entity(str(seg["text"]))

    return Dialog(dialog_id, tuple(events), tuple(entities))


# -- interchange schema -----------------------------------------------------

INTERCHANGE_SCHEMA = "dialog-interchange"
INTERCHANGE_VERSION = 1


def dialog_to_dict(dialog: Dialog) -> dict:
    events = []
    for event in dialog.events:
        if isinstance(event, Utterance):
            label = "user" if event.speaker == Speaker.USER else "agent"
            events.append({"kind": "utterance", "speaker": label, "text": event.text})
        elif isinstance(event, ApiInvocation):
            events.append({"kind": "call", "name": event.name, "args": [list(a) for a in event.args]})
        else:
            events.append(
                {
                    "kind": "result",
                    "name": event.name,
                    "args": [[name, list(values)] for name, values in event.args],
                }
            )
    return {"id": dialog.id, "events": events, "entities": list(dialog.entities)}


def dialog_from_dict(data: dict, json_path: str = "$") -> Dialog:
    _require(isinstance(data, dict), json_path, "dialog must be an object")
    _require("id" in data, json_path, "missing id")
    _require("events" in data, json_path, "missing events")
    events: list[DialogEvent] = []
    for index, record in enumerate(data["events"]):
        e_path = f"{json_path}.events[{index}]"
        _require(isinstance(record, dict) and "kind" in record, e_path, "missing kind")
        kind = record["kind"]
        if kind == "utterance":
            speaker = Speaker.USER if record["speaker"] == "user" else Speaker.AGENT
            events.append(Utterance(speaker, record["text"]))
        elif kind == "call":
            events.append(
                ApiInvocation(record["name"], tuple((a[0], a[1]) for a in record["args"]))
            )
        elif kind == "result":
            events.append(
                ApiResult(
                    record["name"],
                    tuple((a[0], tuple(a[1])) for a in record["args"]),
                )
            )
        else:
            raise SchemaMismatch(e_path, f"unknown event kind {kind!r}")
    return Dialog(str(data["id"]), tuple(events), tuple(data.get("entities", [])))


def save_interchange(dialogs: list[Dialog], path: str | Path) -> None:
    payload = {
        "schema": INTERCHANGE_SCHEMA,
        "version": INTERCHANGE_VERSION,
        "dialogs": [dialog_to_dict(d) for d in dialogs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


# -- ingestion ---------------------------------------------------------------


def ingest(path: str | Path, alias_table: dict[str, str] | None = None) -> IngestResult:
    """Load a dataset file in either schema and validate every dialog.

    Dialogs that violate the token-format rules (reserved literals in text,
    results without a matching invocation, unmappable API names) are
    rejected individually with reasons; structural problems with the file
    itself raise SchemaMismatch.
    """
    aliases = dict(DEFAULT_ALIASES)
    if alias_table:
        aliases.update({normalize_api_name(k): v for k, v in alias_table.items()})
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaMismatch("$", f"not valid JSON: {exc}") from exc

    dialogs: list[Dialog] = []
    report = IngestReport()
    provenance: dict[str, object] = {}

    if isinstance(data, list):
        for index, conv in enumerate(data):
            conv_id = str(conv.get("conversation_id", f"$[{index}]")) if isinstance(conv, dict) else f"$[{index}]"
            try:
                dialog = _convert_external_conversation(conv, index, aliases)
            except SchemaMismatch:
                raise
            except ValueError as exc:
                report.rejected.append((conv_id, str(exc)))
                continue
            dialogs.append(dialog)
            provenance[dialog.id] = conv
    elif isinstance(data, dict) and "dialogs" in data:
        if data.get("schema") not in (None, INTERCHANGE_SCHEMA):
            raise SchemaMismatch("$.schema", f"unknown schema {data.get('schema')!r}")
        if data.get("version") not in (None, INTERCHANGE_VERSION):
            raise SchemaMismatch("$.version", f"unsupported version {data.get('version')!r}")
        for index, record in enumerate(data["dialogs"]):
            d_path = f"$.dialogs[{index}]"
            d_id = str(record.get("id", d_path)) if isinstance(record, dict) else d_path
            try:
                dialog = dialog_from_dict(record, d_path)
            except SchemaMismatch:
                raise
            except ValueError as exc:
                report.rejected.append((d_id, str(exc)))
                continue
            dialogs.append(dialog)
            provenance[dialog.id] = record
    else:
        raise SchemaMismatch("$", "expected a conversation array or a dialogs object")

    report.accepted = len(dialogs)
    return IngestResult(dialogs, report, provenance)


# -- statistics ---------------------------------------------------------------


def compute_stats(dialogs: list[Dialog]) -> CorpusStats:
    """Corpus statistics: turns are utterance events, tokens come from the
    declared whitespace+punctuation tokenizer, vocabulary is case-folded."""
    total_turns = 0
    total_tokens = 0
    vocab: set[str] = set()
    entities: set[str] = set()
    for dialog in dialogs:
        entities.update(dialog.entities)
        for event in dialog.events:
            if not isinstance(event, Utterance):
                continue
            total_turns += 1
            tokens = tokenize(event.text)
            total_tokens += len(tokens)
            vocab.update(t.casefold() for t in tokens)
    dialog_count = len(dialogs)
    return CorpusStats(
        dialog_count=dialog_count,
        total_turns=total_turns,
        total_tokens=total_tokens,
        unique_tokens=len(vocab),
        avg_turns_per_dialog=total_turns / dialog_count if dialog_count else 0.0,
        avg_tokens_per_turn=total_tokens / total_turns if total_turns else 0.0,
        unique_named_entities=len(entities),
    )


# -- sampling -----------------------------------------------------------------


def sample_ids(ids: list[str], spec: SubsetSpec) -> list[str]:
    """Uniform sample without replacement over sorted ids, output re-sorted."""
    universe = sorted(ids)
    if spec.size > len(universe):
        raise SizeExceedsCorpus(spec.size, len(universe))
    return sorted(random.Random(spec.seed).sample(universe, spec.size))


def sample_subset(dialogs: list[Dialog], spec: SubsetSpec) -> list[Dialog]:
    by_id = {d.id: d for d in dialogs}
    return [by_id[i] for i in sample_ids(list(by_id), spec)]


def manifest_text(dialogs_or_ids: list) -> str:
    ids = [d.id if isinstance(d, Dialog) else str(d) for d in dialogs_or_ids]
    return "".join(i + "\n" for i in ids)


# -- export -------------------------------------------------------------------


def export_pairs(dialogs: list[Dialog], format: str, path: str | Path) -> ExportReport:
    """Write one training pair per line; TSV refuses text that cannot carry
    tabs or line breaks losslessly."""
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown export format {format!r}")
    lines: list[str] = []
    pair_count = 0
    dangling: list[str] = []
    for dialog in dialogs:
        batch = generate_pairs(dialog)
        if batch.has_dangling_input:
            dangling.append(dialog.id)
        for pair in batch:
            if format == "tsv":
                for label, text in (("input", pair.input), ("target", pair.target)):
                    bad = next((c for c in text if c in "\t\n\r" or ord(c) < 32), None)
                    if bad is not None:
                        raise UnencodableText(
                            dialog.id, f"{label} contains control character {bad!r}"
                        )
                lines.append(f"{pair.input}\t{pair.target}\n")
            else:
                lines.append(
                    json.dumps(
                        {
                            "input": pair.input,
                            "target": pair.target,
                            "dialog_id": dialog.id,
                            "exchange_index": pair.exchange_index,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
            pair_count += 1
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.writelines(lines)
    return ExportReport(
        pair_count=pair_count,
        dialog_count=len(dialogs),
        dangling_inputs=dangling,
        path=str(path),
        format=format,
    )


def load_pairs(path: str | Path, format: str) -> list[tuple[str, str]]:
    """Read back an export as raw (input, target) strings."""
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if format == "tsv":
                left, _, right = line.partition("\t")
                pairs.append((left, right))
            else:
                record = json.loads(line)
                pairs.append((record["input"], record["target"]))
    return pairs
