#!/usr/bin/env python3
"""Brute-force training-pair enumerator, independent of the package.

Reads a dialog in the interchange JSON format and prints the (input, target)
pairs produced by an index-based walk over the event list: find every maximal
run of target-side events, then slice the history around it. Used to freeze
golden pair files before the pair generator was written.

Usage: python scripts/oracle_pairs.py <dialog.json> [<out.json>]
"""

import json
import sys


def render(event):
    t = event["type"]
    if t == "utterance":
        return ("<U>" if event["speaker"] == "user" else "<A>") + event["text"]
    if t == "invocation":
        return "<PN>" + event["name"] + "".join(
            f"<PAN>{a}<PAV>{v}" for a, v in event["args"]
        )
    if t == "result":
        return "<PR>" + event["name"] + "".join(
            f"<PRAN>{a}" + "".join(f"<PRAV>{v}" for v in vals) for a, vals in event["args"]
        )
    raise SystemExit(f"unknown event type {t!r}")


def is_target(event):
    if event["type"] == "utterance":
        return event["speaker"] == "agent"
    return event["type"] == "invocation"


def enumerate_pairs(events):
    flags = [is_target(e) for e in events]
    # maximal target runs as (start, end) index pairs
    runs = []
    i = 0
    while i < len(flags):
        if flags[i]:
            j = i
            while j < len(flags) and flags[j]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    pairs = []
    for k, (start, end) in enumerate(runs):
        prev_end = runs[k - 1][1] if k else 0
        recent = "".join(render(e) for e in events[prev_end:start])
        context = "".join(render(e) for e in events[:prev_end])
        target = "".join(render(e) for e in events[start:end])
        pairs.append(
            {
                "input": recent + ("<C>" + context if context else ""),
                "target": target,
                "exchange_index": k,
            }
        )
    # anything after the last target run is input-side and produces no pair
    dangling_start = runs[-1][1] if runs else 0
    return pairs, len(events) - dangling_start


def main():
    with open(sys.argv[1], encoding="utf-8") as fh:
        dialog = json.load(fh)
    pairs, dangling_count = enumerate_pairs(dialog["events"])
    out = {"dialog_id": dialog["id"], "pairs": pairs, "dangling_event_count": dangling_count}
    text = json.dumps(out, ensure_ascii=False, indent=2) + "\n"
    if len(sys.argv) > 2:
        with open(sys.argv[2], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
