#!/usr/bin/env python3
"""Reference BLEU scorer, independent of the package.

Implements the declared metric directly with exact fractions: corpus-level,
4-gram, uniform weights, brevity penalty, add-one smoothing on orders 2-4,
whitespace tokenization. The package computes the same metric in log space;
this script exists to cross-check it and to freeze the 20-sentence fixture.

Usage:
  python scripts/bleu_reference.py                 # refresh the fixture file
  python scripts/bleu_reference.py cand.txt ref.txt  # score two text files
"""

import json
import math
import sys
from collections import Counter
from fractions import Fraction

MAX_ORDER = 4


def ngrams(words, n):
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def reference_bleu(candidates, references):
    matched = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cw = cand.split()
        rw = ref.split()
        cand_len += len(cw)
        ref_len += len(rw)
        for n in range(1, MAX_ORDER + 1):
            cand_counts = ngrams(cw, n)
            ref_counts = ngrams(rw, n)
            totals[n - 1] += sum(cand_counts.values())
            matched[n - 1] += sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
    precisions = []
    for n in range(1, MAX_ORDER + 1):
        m, t = matched[n - 1], totals[n - 1]
        if n > 1:  # add-one smoothing on the higher orders
            m, t = m + 1, t + 1
        if t == 0:
            return 0.0
        precisions.append(Fraction(m, t))
    if precisions[0] == 0:
        return 0.0
    geo_mean = math.prod(float(p) for p in precisions) ** (1.0 / MAX_ORDER)
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len) if cand_len else 0.0
    return bp * geo_mean * 100.0


FIXTURE_CANDIDATES = [
    "I found two theaters showing that movie tonight",
    "What time would you like to see it",
    "Sure I can help you book tickets for John Wick",
    "There are showings at seven and nine thirty",
    "Your tickets are booked and your reference number is BK one",
    "Do you have a theater in mind",
    "The comedy options downtown are Grumpy Cats and Banana Split",
    "How many tickets would you like",
    "I booked two tickets for the seven o'clock show",
    "That movie is playing at the Plaza and the Century",
    "Would you prefer an evening showing",
    "I can look for action movies near you",
    "The earliest showing tomorrow is at noon",
    "You are all set enjoy the movie",
    "Which city are you going to see the movie in",
    "I found John Wick and Jack Ryan",
    "Tickets for Friday are still available",
    "Let me check the showtimes for you",
    "The booking failed because the showing is sold out",
    "Anything else I can help you with today",
]

FIXTURE_REFERENCES = [
    "I found two theaters playing that movie tonight",
    "What time would you like to watch it",
    "Sure I can help you with tickets for John Wick",
    "There are showings at seven and nine",
    "Your tickets are booked the reference number is BK one",
    "Do you have a particular theater in mind",
    "The comedies downtown are Grumpy Cats and Banana Split",
    "How many seats would you like",
    "I have booked two tickets for the seven o'clock showing",
    "That movie is playing at the Plaza and at the Century",
    "Would you rather go to an evening showing",
    "I can search for action movies near you",
    "The earliest showing tomorrow starts at noon",
    "You are all set enjoy your movie",
    "What city are you going to see the movie in",
    "I found John Wick and Jack Ryan",
    "Tickets for Friday remain available",
    "Let me look up the showtimes for you",
    "The booking failed since the showing is sold out",
    "Is there anything else I can help you with today",
]


def main():
    if len(sys.argv) == 3:
        with open(sys.argv[1], encoding="utf-8") as fh:
            candidates = [line.rstrip("\n") for line in fh]
        with open(sys.argv[2], encoding="utf-8") as fh:
            references = [line.rstrip("\n") for line in fh]
        print(f"{reference_bleu(candidates, references):.1f}")
        return
    score = reference_bleu(FIXTURE_CANDIDATES, FIXTURE_REFERENCES)
    fixture = {
        "candidates": FIXTURE_CANDIDATES,
        "references": FIXTURE_REFERENCES,
        "expected_score": score,
        "expected_rounded": round(score, 1),
    }
    with open("tests/data/bleu_fixture.json", "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=2)
        fh.write("\n")
    print(f"fixture score: {score:.6f}")


if __name__ == "__main__":
    main()
