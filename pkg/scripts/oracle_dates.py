#!/usr/bin/env python3
"""Date-phrase resolution table, independent of the package.

Declared rule set for coreferential date values:
  today / tonight      -> the anchor's calendar date ("tonight" additionally
                          constrains showtime filtering to 18:00 or later)
  tomorrow             -> anchor date + 1 day
  weekday name         -> the next date with that weekday, on-or-after the
                          anchor date (same weekday resolves to the anchor)
Matching is case-insensitive on the trimmed phrase; anything else passes
through untouched.

Writes tests/data/date_cases.json. Run from the repo root.
"""

import datetime as dt
import json

WEEKDAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]

ANCHORS = [
    "2020-11-05T10:00:00",  # a Thursday
    "2020-12-31T22:15:00",  # year boundary
    "2024-02-28T09:00:00",  # leap-year February
    "2021-06-13T18:00:00",  # a Sunday
]


def resolve(anchor: dt.datetime, phrase: str):
    key = phrase.strip().lower()
    if key in ("today", "tonight"):
        return anchor.date(), key == "tonight"
    if key == "tomorrow":
        return anchor.date() + dt.timedelta(days=1), False
    if key in WEEKDAYS:
        ahead = (WEEKDAYS.index(key) - anchor.weekday()) % 7
        return anchor.date() + dt.timedelta(days=ahead), False
    return None, False


def main():
    cases = []
    for anchor_text in ANCHORS:
        anchor = dt.datetime.fromisoformat(anchor_text)
        phrases = ["today", "Tonight", "tomorrow", "TOMORROW"] + WEEKDAYS + [w.capitalize() for w in WEEKDAYS]
        phrases += ["2020-11-05", "next week", "Oak Valley Arkansas", "the 5th"]
        for phrase in phrases:
            resolved, evening = resolve(anchor, phrase)
            cases.append(
                {
                    "anchor": anchor_text,
                    "phrase": phrase,
                    "resolved": resolved.isoformat() if resolved else None,
                    "evening_filter": evening,
                }
            )
    with open("tests/data/date_cases.json", "w", encoding="utf-8") as fh:
        json.dump(cases, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(cases)} cases")


if __name__ == "__main__":
    main()
