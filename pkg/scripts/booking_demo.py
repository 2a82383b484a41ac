#!/usr/bin/env python3
"""Run the canonical scripted booking conversation end to end.

Uses the rule-based backend, the bundled movie KB, and a fixed clock so the
run is byte-for-byte reproducible. Prints each turn with its API trace, then
the raw token-format transcript and the training pairs it decomposes into.

Usage:
  python scripts/booking_demo.py
  python scripts/booking_demo.py --clock 2020-11-05T10:00:00 --ledger /tmp/bookings.jsonl
"""

import argparse
import datetime as dt
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialogkit.adapter import ApiAdapter, KnowledgeBase, ResolutionContext
from dialogkit.codec import serialize_events
from dialogkit.pairs import generate_pairs
from dialogkit.core import Dialog
from dialogkit.policy import RuleBasedBackend
from dialogkit.runtime import DialogSession
from dialogkit.service import DEFAULT_KB_PATH

SCRIPT = [
    "Can you help me book a movie ticket?",
    "I'd like to see John Wick.",
    "Are there any theaters nearby?",
    "Let's do AMC 20 tonight.",
    "7 pm works. Two tickets please.",
    "Yes, please book it.",
    "Great, thanks!",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--clock", default="2020-11-05T10:00:00", help="ISO anchor timestamp")
    parser.add_argument("--location", default="Mountain View", help="default location for 'nearby'")
    parser.add_argument("--kb", default=str(DEFAULT_KB_PATH), help="KB fixture path")
    parser.add_argument("--ledger", help="append booking records to this JSONL file")
    args = parser.parse_args()

    kb = KnowledgeBase.load(args.kb)
    if args.ledger:
        kb.ledger_path = Path(args.ledger)
    session = DialogSession(
        backend=RuleBasedBackend(kb),
        adapter=ApiAdapter(
            kb=kb,
            ctx=ResolutionContext(
                clock_anchor=dt.datetime.fromisoformat(args.clock),
                default_location=args.location,
            ),
        ),
    )

    for text in SCRIPT:
        print(f"user:  {text}")
        outcome = session.submit_utterance(text)
        for entry in outcome.trace:
            rendered_args = " ".join(f"{n}={v}" for n, v in entry.invocation.args)
            print(f"  [api] {entry.invocation.name} {rendered_args}".rstrip())
            for name, values in entry.result.args:
                print(f"        -> {name}: {', '.join(values)}")
        print(f"agent: {outcome.agent_text}")
        print()

    if session.state.booking_refs:
        print(f"booking refs: {', '.join(session.state.booking_refs)}")

    transcript = list(session.transcript())
    print()
    print("raw transcript:")
    print(serialize_events(transcript))
    print()
    print("training pairs:")
    for pair in generate_pairs(Dialog("demo", tuple(transcript))):
        print(f"  [{pair.exchange_index}] input:  {pair.input}")
        print(f"      target: {pair.target}")


if __name__ == "__main__":
    main()
