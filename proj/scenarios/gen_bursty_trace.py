#!/usr/bin/env python3
"""Synthetic bursty online trace for the co-location sweep.

Arrivals follow a slow tide with several minute-scale spikes on top,
sampled by thinning a Poisson process. Prompt and output lengths are drawn
from a length pool (any trace CSV with prompt_len and output_len columns).

Usage: python3 gen_bursty_trace.py <length_pool.csv> <out.csv> [--rate R]
       [--duration S] [--seed N]
"""

import argparse
import csv
import math
import random

# (start_s, length_s, multiplier)
SPIKES = [(240, 120, 2.6), (780, 60, 3.0), (1320, 180, 2.2)]


def rate_at(t, base, duration):
    tide = 1.0 + 0.25 * math.sin(2.0 * math.pi * t / duration)
    spike = 1.0
    for start, length, mult in SPIKES:
        if start <= t < start + length:
            spike = max(spike, mult)
    return base * tide * spike


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("pool")
    ap.add_argument("out")
    ap.add_argument("--rate", type=float, default=0.5)
    ap.add_argument("--duration", type=float, default=1800.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    with open(args.pool) as f:
        pool = [(int(r["prompt_len"]), int(r["output_len"])) for r in csv.DictReader(f)]
    rng = random.Random(args.seed)
    peak = args.rate * 1.25 * max(m for _, _, m in SPIKES)
    rows = []
    t = 0.0
    while True:
        t += rng.expovariate(peak)
        if t >= args.duration:
            break
        if rng.random() * peak <= rate_at(t, args.rate, args.duration):
            p, o = rng.choice(pool)
            rows.append((t, p, o))
    with open(args.out, "w") as f:
        f.write("arrival_ts,prompt_len,output_len,class,id\n")
        for k, (t, p, o) in enumerate(rows):
            f.write(f"{t:.6f},{p},{o},online,on-{k}\n")


if __name__ == "__main__":
    main()
