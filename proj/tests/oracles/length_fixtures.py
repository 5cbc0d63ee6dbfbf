#!/usr/bin/env python3
"""Writes length-pool fixtures whose sample means are exact targets.

Usage: python3 length_fixtures.py <out_dir>
"""

import random
import sys
from pathlib import Path


def pool(rng, n, mean, lo, hi):
    target = round(mean * n)
    vals = [min(hi, max(lo, int(rng.lognormvariate(0, 0.8) * mean))) for _ in range(n)]
    # Nudge entries one token at a time until the sum is exact.
    while sum(vals) != target:
        i = rng.randrange(n)
        step = 1 if sum(vals) < target else -1
        if lo <= vals[i] + step <= hi:
            vals[i] += step
    return vals


def write(path, cls, prompts, outputs, gap):
    rows = ["arrival_ts,prompt_len,output_len,class,id"]
    for k, (p, o) in enumerate(zip(prompts, outputs)):
        rows.append(f"{k * gap!r},{p},{o},{cls},{cls[:3]}-{k}")
    path.write_text("\n".join(rows) + "\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    rng = random.Random(4242)
    n = 100
    write(out / "ooc_online_lengths.csv", "online",
          pool(rng, n, 1892.47, 16, 8192), pool(rng, n, 1062.62, 4, 4096), 0.5)
    write(out / "ooc_offline_lengths.csv", "offline",
          pool(rng, n, 1200.52, 16, 8192), pool(rng, n, 671.51, 4, 4096), 0.5)


if __name__ == "__main__":
    main()
