"""Acceptance gate: one test per primary criterion, each at its stated
tolerance. Run with -v to get one pass/fail line per criterion."""

from __future__ import annotations

import datetime as dt
import hashlib
import os
import random
import time

from dialogkit import (
    ApiAdapter,
    Dialog,
    KnowledgeBase,
    LengthPolicy,
    RaterTask,
    RatingRecord,
    ResolutionContext,
    RuleBasedBackend,
    Speaker,
    Utterance,
    aggregate_ratings,
    bleu,
    count_tokens,
    generate_pairs,
    parse_stream,
    serialize_events,
    split_input,
)
from dialogkit.corpus import SubsetSpec, compute_stats, ingest, manifest_text, sample_ids
from dialogkit.runtime import DialogSession
from dialogkit.service import DEFAULT_KB_PATH

from conftest import GOLDEN_PAIRS, GOLDEN_SERIALIZED, SAMPLE50_PATH, load_json, random_dialog

DATASET_ENV = "DIALOGKIT_DATASET_PATH"

FIXED_ANCHOR = dt.datetime.fromisoformat("2020-11-05T10:00:00")

BOOKING_TURNS = [
    "Can you help me book a movie ticket?",
    "I'd like to see John Wick.",
    "Are there any theaters nearby?",
    "Let's do AMC 20 tonight.",
    "7 pm works. Two tickets please.",
    "Yes, please book it.",
    "Great, thanks!",
]


def _pass(line: str) -> None:
    print(f"[acceptance] PASS {line}")


def test_golden_fidelity(golden_dialog):
    started = time.monotonic()
    assert serialize_events(golden_dialog.events) == GOLDEN_SERIALIZED
    batch = generate_pairs(golden_dialog)
    assert [(p.input, p.target) for p in batch] == list(GOLDEN_PAIRS)
    assert not batch.has_dangling_input
    elapsed = time.monotonic() - started
    assert elapsed < 1.0, f"took {elapsed:.3f}s, budget is 1s"
    _pass(f"golden fidelity: serialization and all 3 pairs byte-exact in {elapsed:.3f}s")


def test_round_trip_property_suite():
    started = time.monotonic()
    rng = random.Random(20260813)
    for index in range(1000):
        dialog = random_dialog(rng, f"rt-{index:05d}")
        serialized = serialize_events(dialog.events)
        assert parse_stream(serialized) == list(dialog.events), dialog.id

        batch = generate_pairs(dialog)
        rebuilt = []
        for pair in batch:
            recent, _ = split_input(pair.input)
            rebuilt.append(recent + pair.target)
        rebuilt.append(serialize_events(batch.dangling_events))
        assert "".join(rebuilt) == serialized, dialog.id
    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"took {elapsed:.3f}s, budget is 30s"
    _pass(f"round-trip property suite: 1000 dialogs, zero failures, {elapsed:.3f}s")


def test_dataset_statistics():
    dataset_path = os.environ.get(DATASET_ENV)
    if dataset_path and os.path.exists(dataset_path):
        stats = compute_stats(ingest(dataset_path).dialogs)
        assert stats.dialog_count == 23789
        assert stats.total_turns == 481632
        assert abs(stats.avg_turns_per_dialog - 20.25) <= 0.01
        assert abs(stats.avg_tokens_per_turn - 10.35) <= 0.05 * 10.35
        assert abs(stats.unique_tokens - 62868) <= 0.05 * 62868
        _pass("dataset statistics: full dataset matches the reference statistics")
    else:
        stats = compute_stats(ingest(str(SAMPLE50_PATH)).dialogs)
        assert stats.to_dict() == load_json("sample50_stats.json")
        _pass(
            "dataset statistics: offline fallback, bundled 50-dialog sample matches "
            "its committed golden stats exactly"
        )


def test_end_to_end_determinism(tmp_path):
    ledger = tmp_path / "bookings.jsonl"
    transcripts = []
    for run in range(10):
        lines_before = (
            len(ledger.read_text().splitlines()) if ledger.exists() else 0
        )
        kb = KnowledgeBase.load(DEFAULT_KB_PATH)
        kb.ledger_path = ledger
        ctx = ResolutionContext(clock_anchor=FIXED_ANCHOR, default_location="Mountain View")
        session = DialogSession(
            backend=RuleBasedBackend(kb),
            adapter=ApiAdapter(kb=kb, ctx=ctx),
        )
        trace_names = []
        for text in BOOKING_TURNS:
            outcome = session.submit_utterance(text)
            trace_names.extend(entry.invocation.name for entry in outcome.trace)
        assert trace_names == ["find_theaters", "find_showtimes", "book_tickets"]
        lines_after = len(ledger.read_text().splitlines())
        assert lines_after == lines_before + 1, "ledger must gain exactly one entry"
        transcripts.append(serialize_events(session.transcript()))
    assert len(set(transcripts)) == 1, "all 10 transcripts must be byte-identical"
    _pass("end-to-end determinism: 10 byte-identical booking runs, ordered trace, +1 ledger entry each")


class _RecordingBackend:
    def __init__(self):
        self.inputs: list[str] = []
        self._turn = 0

    def predict(self, input_text: str) -> str:
        self.inputs.append(input_text)
        self._turn += 1
        reply = " ".join(f"reply{self._turn}word{j}" for j in range(40))
        return f"<A>{reply}"


def test_lifecycle_truncation():
    backend = _RecordingBackend()
    kb = KnowledgeBase.load(DEFAULT_KB_PATH)
    session = DialogSession(
        backend=backend,
        adapter=ApiAdapter(
            kb=kb,
            ctx=ResolutionContext(clock_anchor=FIXED_ANCHOR, default_location="Mountain View"),
        ),
        policy=LengthPolicy(),
    )
    texts = []
    truncated_flags = []
    for i in range(30):
        text = " ".join(f"turn{i}word{j}" for j in range(60))
        texts.append(text)
        outcome = session.submit_utterance(text)
        truncated_flags.append(outcome.truncated)

    assert len(backend.inputs) == 30
    for text, model_input in zip(texts, backend.inputs):
        assert count_tokens(model_input) <= 1024
        recent, _ = split_input(model_input)
        assert recent == f"<U>{text}", "segment before the separator must stay intact"
    assert any(truncated_flags), "a 30-exchange session at this length must truncate"
    _pass("lifecycle/truncation: 30 exchanges, every model input <= 1024 tokens, recent turn intact")


def test_bleu_oracle():
    fixture = load_json("bleu_fixture.json")
    score = bleu(fixture["candidates"], fixture["references"])
    assert abs(score - fixture["expected_score"]) <= 0.1
    identical = ["the show starts at seven", "two tickets for tonight please"]
    assert bleu(identical, identical) == 100.0
    _pass(
        f"BLEU oracle: fixture scores {score:.4f} within 0.1 of committed reference, "
        "identical corpora score 100.0"
    )


def _headline_fixture():
    yes_counts = {
        ("Model", "PlainResponse"): 865,
        ("Model", "ResponseToApi"): 918,
        ("Model", "ApiCall"): 971,
        ("Human", "PlainResponse"): 884,
        ("Human", "ResponseToApi"): 932,
        ("Human", "ApiCall"): 946,
    }
    tasks, records = [], []
    index = 0
    for (source, kind), yes_count in yes_counts.items():
        for i in range(1000):
            task_id = f"rt-{index:05d}"
            index += 1
            tasks.append(RaterTask(task_id, "Cust: hi", kind, "ok", source, (i % 9) + 1))
            votes = (True, True, False) if i < yes_count else (False, False, True)
            for rater, vote in enumerate(votes):
                records.append(
                    RatingRecord(task_id, f"r{rater}", vote, () if vote else ("other",))
                )
    return tasks, records


def test_eval_aggregation_headline_row():
    tasks, records = _headline_fixture()
    report = aggregate_ratings(records, tasks)
    assert report.deltas == {
        "PlainResponse": -1.9,
        "ResponseToApi": -1.4,
        "ApiCall": 2.5,
    }
    for source in ("Model", "Human"):
        assert sorted(report.per_exchange[source]) == list(range(1, 10))
    _pass("eval aggregation: 10K fixture deltas exactly -1.9 / -1.4 / +2.5, buckets 1-9 present")


def test_subset_manifest_digests():
    fixture = load_json("subset_manifests.json")
    universe = [f"tt-{i:05d}" for i in range(fixture["universe_size"])]
    for size_str, expected in fixture["manifests"].items():
        size = int(size_str)
        text = manifest_text(sample_ids(universe, SubsetSpec(size=size, seed=size)))
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        assert digest == expected["sha256"], f"size {size}"
    dataset_path = os.environ.get(DATASET_ENV)
    if dataset_path and os.path.exists(dataset_path):
        ids = [d.id for d in ingest(dataset_path).dialogs]
        for size in (5000, 7500, 10000, 21000):
            first = manifest_text(sample_ids(ids, SubsetSpec(size=size, seed=size)))
            second = manifest_text(sample_ids(ids, SubsetSpec(size=size, seed=size)))
            assert first == second
    _pass("subset sampling: 5000/7500/10000/21000 manifests byte-identical to frozen digests")
