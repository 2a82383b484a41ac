"""Evaluation harness: BLEU scoring, rater-task export, rating aggregation.

The rater workflow mirrors a crowd "makes-sense" study: tasks pair a
rendered conversation context with a candidate response (a plain reply, a
reply verbalizing API results, or a predicted API call), each task is rated
several times, and aggregation takes the majority vote per task, reports
per-kind percentages for model vs. human candidates, their deltas, and a
per-exchange-count accuracy series.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .codec import parse_stream
from .core import ApiInvocation, ApiResult, Dialog, Speaker, Utterance
from .pairs import generate_pairs

MAX_ORDER = 4

NEGATIVE_REASONS = ("off_topic", "repeated_information", "incorrect_details", "language_mistakes", "other")

RESPONSE_KINDS = ("PlainResponse", "ResponseToApi", "ApiCall")
SOURCES = ("Model", "Human")

MAX_EXCHANGES = 9


class EvalError(Exception):
    pass


class LengthMismatch(EvalError):
    def __init__(self, candidates: int, references: int):
        super().__init__(f"{candidates} candidates vs {references} references")


class EmptyCorpus(EvalError):
    pass


class InsufficientPositions(EvalError):
    def __init__(self, requested: int, achievable: int, per_stratum: dict[str, int]):
        super().__init__(f"requested {requested} tasks but only {achievable} positions exist")
        self.requested = requested
        self.achievable = achievable
        self.per_stratum = per_stratum


# -- BLEU ----------------------------------------------------------------------


def _ngram_counts(words: list[str], n: int) -> Counter:
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def bleu(candidates: list[str], references: list[str]) -> float:
    """Corpus BLEU in [0, 100]: 4-gram, uniform weights, brevity penalty,
    add-one smoothing on orders 2-4, whitespace tokenization."""
    if len(candidates) != len(references):
        raise LengthMismatch(len(candidates), len(references))
    if not candidates:
        raise EmptyCorpus("cannot score an empty corpus")
    matched = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_words = cand.split()
        ref_words = ref.split()
        cand_len += len(cand_words)
        ref_len += len(ref_words)
        for n in range(1, MAX_ORDER + 1):
            cand_counts = _ngram_counts(cand_words, n)
            ref_counts = _ngram_counts(ref_words, n)
            totals[n - 1] += sum(cand_counts.values())
            matched[n - 1] += sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
    log_sum = 0.0
    for n in range(1, MAX_ORDER + 1):
        m, t = matched[n - 1], totals[n - 1]
        if n > 1:
            m, t = m + 1, t + 1
        if t == 0 or m == 0:
            return 0.0
        log_sum += math.log(m / t)
    if cand_len == 0:
        return 0.0
    brevity = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / MAX_ORDER) * 100.0


def bleu_rounded(candidates: list[str], references: list[str]) -> float:
    return round(bleu(candidates, references), 1)


# -- rater tasks ---------------------------------------------------------------


@dataclass(frozen=True)
class RaterTask:
    task_id: str
    context: str
    response_kind: str
    candidate: str
    source: str
    exchange_count: int

    def __post_init__(self):
        if self.response_kind not in RESPONSE_KINDS:
            raise ValueError(f"unknown response kind {self.response_kind!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.exchange_count < 1:
            raise ValueError("exchange_count must be at least 1")

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "context": self.context,
            "response_kind": self.response_kind,
            "candidate": self.candidate,
            "source": self.source,
            "exchange_count": self.exchange_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RaterTask":
        return cls(
            task_id=data["task_id"],
            context=data["context"],
            response_kind=data["response_kind"],
            candidate=data["candidate"],
            source=data["source"],
            exchange_count=int(data["exchange_count"]),
        )


@dataclass(frozen=True)
class RatingRecord:
    task_id: str
    rater_id: str
    makes_sense: bool
    negative_reasons: tuple[str, ...] = ()
    missing_actions: bool | None = None

    def __post_init__(self):
        if self.makes_sense and self.negative_reasons:
            raise ValueError("negative reasons are only valid when makes_sense is false")
        if not self.makes_sense and not self.negative_reasons:
            raise ValueError("a negative rating needs at least one reason")
        for reason in self.negative_reasons:
            if reason not in NEGATIVE_REASONS:
                raise ValueError(f"unknown negative reason {reason!r}")


def render_action(invocation: ApiInvocation) -> str:
    parts = [invocation.name.upper()]
    parts.extend(f"{name}: {value}" for name, value in invocation.args)
    return " ".join(parts)


def render_result_line(result: ApiResult) -> str:
    rendered = "; ".join(f"{name}: {', '.join(values)}" for name, values in result.args)
    return f"[{result.name} returned {rendered}]"


def render_context(events: list) -> str:
    """Human-readable transcript: speaker-labeled utterances, bracketed API
    lines, no raw token literals."""
    lines = []
    for event in events:
        if isinstance(event, Utterance):
            label = "Cust" if event.speaker == Speaker.USER else "Agent"
            lines.append(f"{label}: {event.text}")
        elif isinstance(event, ApiInvocation):
            lines.append(f"[call {render_action(event)}]")
        else:
            lines.append(render_result_line(event))
    return "\n".join(lines)


@dataclass(frozen=True)
class CandidatePosition:
    """One rateable position: the events before the response, the response
    events themselves, and which side produced the response text."""

    dialog_id: str
    exchange_index: int
    context_events: tuple
    response_kind: str
    candidate: str
    source: str

    @property
    def exchange_count(self) -> int:
        return self.exchange_index + 1


def _target_kind(target_events: list, context_events: list) -> str:
    if any(isinstance(e, ApiInvocation) for e in target_events):
        return "ApiCall"
    # A response "to" an API is one whose pending input run (the trailing
    # input-side events it reacts to) contains at least one result.
    for event in reversed(context_events):
        is_input = isinstance(event, ApiResult) or (
            isinstance(event, Utterance) and event.speaker == Speaker.USER
        )
        if not is_input:
            break
        if isinstance(event, ApiResult):
            return "ResponseToApi"
    return "PlainResponse"


def _render_candidate(target: str) -> tuple[str, list]:
    events = parse_stream(target)
    lines = []
    for event in events:
        if isinstance(event, Utterance):
            lines.append(event.text)
        elif isinstance(event, ApiInvocation):
            lines.append(render_action(event))
        else:
            lines.append(render_result_line(event))
    return "\n".join(lines), events


def candidate_positions(
    dialogs: list[Dialog],
    source: str = "Human",
    model_targets: dict[tuple[str, int], str] | None = None,
) -> list[CandidatePosition]:
    """Enumerate rateable positions from dialogs.

    By default the dataset's own targets are the candidates (source Human);
    model_targets maps (dialog_id, exchange_index) to a predicted target
    string to yield Model candidates instead.
    """
    positions: list[CandidatePosition] = []
    for dialog in dialogs:
        events = list(dialog.events)
        cursor = 0
        for pair in generate_pairs(dialog):
            # Locate this pair's target run by walking the event list.
            while cursor < len(events):
                probe = events[cursor]
                is_target = isinstance(probe, ApiInvocation) or (
                    isinstance(probe, Utterance) and probe.speaker == Speaker.AGENT
                )
                if is_target:
                    break
                cursor += 1
            start = cursor
            while cursor < len(events):
                probe = events[cursor]
                is_target = isinstance(probe, ApiInvocation) or (
                    isinstance(probe, Utterance) and probe.speaker == Speaker.AGENT
                )
                if not is_target:
                    break
                cursor += 1
            context_events = events[:start]
            target_events = events[start:cursor]
            if pair.exchange_index + 1 > MAX_EXCHANGES:
                continue
            key = (dialog.id, pair.exchange_index)
            if model_targets is not None:
                if key not in model_targets:
                    continue
                candidate, parsed = _render_candidate(model_targets[key])
                kind = _target_kind(parsed, context_events)
                positions.append(
                    CandidatePosition(
                        dialog.id, pair.exchange_index, tuple(context_events), kind, candidate, "Model"
                    )
                )
            else:
                candidate, _ = _render_candidate(pair.target)
                kind = _target_kind(target_events, context_events)
                positions.append(
                    CandidatePosition(
                        dialog.id, pair.exchange_index, tuple(context_events), kind, candidate, source
                    )
                )
    return positions


@dataclass
class ExportManifest:
    seed: int
    count: int
    ratings_per_task: int
    strata: dict[str, int]
    source_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "ratings_per_task": self.ratings_per_task,
            "strata": self.strata,
            "source_counts": self.source_counts,
        }


def export_rater_tasks(
    positions: list[CandidatePosition],
    count: int,
    path: str | Path,
    seed: int = 0,
    ratings_per_task: int = 3,
) -> tuple[list[RaterTask], ExportManifest]:
    """Stratified sample over (response kind, exchange count); writes one
    task per JSONL line plus a .manifest.json next to it. Deterministic for
    a fixed seed."""
    pool = sorted(positions, key=lambda p: (p.dialog_id, p.exchange_index, p.source))
    if count > len(pool):
        achievable = Counter(f"{p.response_kind}/{p.exchange_count}" for p in pool)
        raise InsufficientPositions(count, len(pool), dict(achievable))

    strata: dict[tuple[str, int], list[CandidatePosition]] = {}
    for position in pool:
        strata.setdefault((position.response_kind, position.exchange_count), []).append(position)

    # Proportional allocation, exact total via largest remainders.
    keys = sorted(strata)
    quotas: dict[tuple[str, int], int] = {}
    remainders: list[tuple[float, tuple[str, int]]] = []
    total = len(pool)
    allocated = 0
    for key in keys:
        exact = count * len(strata[key]) / total
        quotas[key] = int(exact)
        allocated += int(exact)
        remainders.append((exact - int(exact), key))
    remainders.sort(key=lambda item: (-item[0], item[1]))
    for _, key in remainders:
        if allocated >= count:
            break
        if quotas[key] < len(strata[key]):
            quotas[key] += 1
            allocated += 1
    # Rounding can leave a shortfall when some strata are saturated.
    if allocated < count:
        for key in keys:
            while allocated < count and quotas[key] < len(strata[key]):
                quotas[key] += 1
                allocated += 1

    rng = random.Random(seed)
    chosen: list[CandidatePosition] = []
    for key in keys:
        quota = quotas[key]
        if quota:
            chosen.extend(rng.sample(strata[key], quota))
    chosen.sort(key=lambda p: (p.dialog_id, p.exchange_index, p.source))

    tasks = [
        RaterTask(
            task_id=f"rt-{index:04d}",
            context=render_context(list(position.context_events)),
            response_kind=position.response_kind,
            candidate=position.candidate,
            source=position.source,
            exchange_count=position.exchange_count,
        )
        for index, position in enumerate(chosen)
    ]

    manifest = ExportManifest(
        seed=seed,
        count=len(tasks),
        ratings_per_task=ratings_per_task,
        strata={f"{kind}/{n}": quotas[(kind, n)] for kind, n in keys if quotas[(kind, n)]},
        source_counts=dict(Counter(t.source for t in tasks)),
    )

    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps(task.to_dict(), ensure_ascii=False) + "\n")
    manifest_path = path.with_suffix(path.suffix + ".manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return tasks, manifest


def load_rater_tasks(path: str | Path) -> list[RaterTask]:
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                tasks.append(RaterTask.from_dict(json.loads(line)))
    return tasks


# -- ratings CSV -----------------------------------------------------------------

RATINGS_HEADER = ["task_id", "rater_id", "makes_sense", "negative_reasons", "missing_actions"]


def write_ratings_csv(records: list[RatingRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATINGS_HEADER)
        for record in records:
            writer.writerow(
                [
                    record.task_id,
                    record.rater_id,
                    "true" if record.makes_sense else "false",
                    ";".join(record.negative_reasons),
                    "" if record.missing_actions is None else ("true" if record.missing_actions else "false"),
                ]
            )


def read_ratings_csv(path: str | Path) -> list[RatingRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RATINGS_HEADER:
            raise ValueError(f"ratings CSV must have header {','.join(RATINGS_HEADER)}")
        for row in reader:
            reasons = tuple(r for r in row["negative_reasons"].split(";") if r)
            missing = row["missing_actions"]
            records.append(
                RatingRecord(
                    task_id=row["task_id"],
                    rater_id=row["rater_id"],
                    makes_sense=row["makes_sense"] == "true",
                    negative_reasons=reasons,
                    missing_actions=None if missing == "" else missing == "true",
                )
            )
    return records


# -- aggregation ------------------------------------------------------------------


@dataclass
class ScoreReport:
    # Majority-vote makes-sense percentage per (source, response kind).
    percentages: dict[str, dict[str, float | None]]
    # Model minus human, per response kind.
    deltas: dict[str, float | None]
    # Pooled per-rating yes rate (not majority), per (source, kind).
    raw_agreement: dict[str, dict[str, float | None]]
    # Accuracy per exchange count 1..9, per source; None where no tasks.
    per_exchange: dict[str, dict[int, float | None]]
    task_counts: dict[str, dict[str, int]]
    incomplete_tasks: list[str] = field(default_factory=list)
    unknown_tasks: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "percentages": self.percentages,
            "deltas": self.deltas,
            "raw_agreement": self.raw_agreement,
            "per_exchange": {
                source: {str(k): v for k, v in series.items()}
                for source, series in self.per_exchange.items()
            },
            "task_counts": self.task_counts,
            "incomplete_tasks": self.incomplete_tasks,
            "unknown_tasks": self.unknown_tasks,
        }

    def render_table(self) -> str:
        def fmt(value: float | None) -> str:
            return "-" if value is None else f"{value:.1f}%"

        def fmt_delta(value: float | None) -> str:
            return "-" if value is None else f"{value:+.1f}%"

        rows = [("Response kind", "Model", "Human", "Delta")]
        for kind in RESPONSE_KINDS:
            rows.append(
                (
                    kind,
                    fmt(self.percentages["Model"].get(kind)),
                    fmt(self.percentages["Human"].get(kind)),
                    fmt_delta(self.deltas.get(kind)),
                )
            )
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        return "\n".join(
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        )


def aggregate_ratings(records: list[RatingRecord], tasks: list[RaterTask]) -> ScoreReport:
    """Majority vote per task, percentages per (source, kind), deltas, and
    the per-exchange series. Tasks with fewer than three ratings are
    excluded and reported; records naming unknown tasks likewise."""
    by_id = {task.task_id: task for task in tasks}
    grouped: dict[str, list[RatingRecord]] = {}
    unknown: list[str] = []
    for record in records:
        if record.task_id not in by_id:
            if record.task_id not in unknown:
                unknown.append(record.task_id)
            continue
        task = by_id[record.task_id]
        if record.missing_actions is not None and task.response_kind != "ApiCall":
            raise ValueError(
                f"rating for {record.task_id}: missing_actions only applies to ApiCall tasks"
            )
        grouped.setdefault(record.task_id, []).append(record)

    majorities: dict[str, bool] = {}
    incomplete: list[str] = []
    raw_yes: dict[tuple[str, str], int] = {}
    raw_total: dict[tuple[str, str], int] = {}
    for task_id, task_records in sorted(grouped.items()):
        task = by_id[task_id]
        if len(task_records) < 3:
            incomplete.append(task_id)
            continue
        yes = sum(1 for r in task_records if r.makes_sense)
        majorities[task_id] = yes * 2 > len(task_records)
        key = (task.source, task.response_kind)
        raw_yes[key] = raw_yes.get(key, 0) + yes
        raw_total[key] = raw_total.get(key, 0) + len(task_records)

    def percentage(yes: int, total: int) -> float | None:
        return round(100.0 * yes / total, 1) if total else None

    percentages: dict[str, dict[str, float | None]] = {s: {} for s in SOURCES}
    task_counts: dict[str, dict[str, int]] = {s: {} for s in SOURCES}
    for source in SOURCES:
        for kind in RESPONSE_KINDS:
            ids = [
                t
                for t in majorities
                if by_id[t].source == source and by_id[t].response_kind == kind
            ]
            task_counts[source][kind] = len(ids)
            percentages[source][kind] = percentage(
                sum(1 for t in ids if majorities[t]), len(ids)
            )

    deltas: dict[str, float | None] = {}
    for kind in RESPONSE_KINDS:
        model = percentages["Model"].get(kind)
        human = percentages["Human"].get(kind)
        deltas[kind] = round(model - human, 1) if model is not None and human is not None else None

    raw_agreement: dict[str, dict[str, float | None]] = {s: {} for s in SOURCES}
    for source in SOURCES:
        for kind in RESPONSE_KINDS:
            key = (source, kind)
            raw_agreement[source][kind] = percentage(raw_yes.get(key, 0), raw_total.get(key, 0))

    per_exchange: dict[str, dict[int, float | None]] = {s: {} for s in SOURCES}
    for source in SOURCES:
        for n in range(1, MAX_EXCHANGES + 1):
            ids = [
                t
                for t in majorities
                if by_id[t].source == source and by_id[t].exchange_count == n
            ]
            per_exchange[source][n] = percentage(sum(1 for t in ids if majorities[t]), len(ids))

    return ScoreReport(
        percentages=percentages,
        deltas=deltas,
        raw_agreement=raw_agreement,
        per_exchange=per_exchange,
        task_counts=task_counts,
        incomplete_tasks=incomplete,
        unknown_tasks=unknown,
    )
