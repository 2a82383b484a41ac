#!/usr/bin/env python3
"""Freeze golden manifest digests for deterministic subset sampling.

Declares the sampling algorithm inline: ids sorted, random.Random(seed)
.sample for uniform choice without replacement, selected ids re-sorted, one
id per line with a trailing newline. Runs it over a synthetic universe the
size of the full dataset (23,789 dialog ids) at the four standard subset
sizes, seeding each draw with its size. Writes the SHA-256 of every
manifest to tests/data/subset_manifests.json so the toolkit's sampler can
be byte-checked against this script forever.
"""

import hashlib
import json
import pathlib
import random

UNIVERSE_SIZE = 23789
SIZES = [5000, 7500, 10000, 21000]


def manifest_for(ids, size, seed):
    chosen = sorted(random.Random(seed).sample(ids, size))
    return "".join(i + "\n" for i in chosen)


def main():
    ids = sorted(f"tt-{i:05d}" for i in range(UNIVERSE_SIZE))
    out = {
        "universe_size": UNIVERSE_SIZE,
        "id_format": "tt-{i:05d}",
        "seed_rule": "seed equals subset size",
        "manifests": {},
    }
    for size in SIZES:
        text = manifest_for(ids, size, seed=size)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        out["manifests"][str(size)] = {
            "sha256": digest,
            "first_id": text.splitlines()[0],
            "last_id": text.splitlines()[-1],
            "line_count": size,
        }
        print(f"size {size}: {digest}")
    path = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "subset_manifests.json"
    path.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
