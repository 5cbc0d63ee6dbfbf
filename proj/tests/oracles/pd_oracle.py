#!/usr/bin/env python3
"""Reference trace of a plain prefill/decode disaggregated cluster.

One prefill instance runs prompts first-come first-served, pushes the KV
to one decode instance, and the decode instance batches every resident
request each step. Latencies come from the brute-force operator list in
perf_oracle.py on a one-layer unit model. The resulting per-request
timings are frozen into tests/data/pd_unit_oracle.csv.

Usage: python3 pd_oracle.py <out_dir>
"""

import heapq
import sys
from pathlib import Path

from perf_oracle import enumerate_iteration, kv_cache_bytes

UNIT = dict(layers=1, hidden=1, h_q=1, h_kv=1, head_dim=1, mlp=1, vocab=1,
            d=2, tp=1)
UNIT_HW = dict(f_g=1e3, f_ap=1e3, f_ad=1e3, m_g=1e3, m_a=1e3, o_p=0.002,
               o_d=0.001, b_c=1e3)

# (id, arrival, prompt, output)
TRACE = [
    ("a", 0.0, 8, 4),
    ("b", 0.01, 3, 2),
    ("c", 0.5, 20, 1),
    ("d", 0.6, 5, 6),
    ("e", 0.61, 2, 3),
]

# Same-time ordering: transfer, decode step, prefill, arrival.
TRANSFER, STEP, PREFILL, ARRIVAL = range(4)


def simulate(trace):
    events = []
    seq = 0

    def push(t, kind, payload):
        nonlocal seq
        heapq.heappush(events, (t, kind, seq, payload))
        seq += 1

    for rid, at, p, o in trace:
        push(at, ARRIVAL, rid)
    spec = {rid: (at, p, o) for rid, at, p, o in trace}
    emits = {rid: [] for rid, *_ in trace}
    done = {}
    queue = []
    prefill_busy = False
    decode_busy = False
    residents = []  # [rid, kv_tokens]
    batch = []

    def start_prefill(now):
        nonlocal prefill_busy
        if prefill_busy or not queue:
            return
        rid = queue.pop(0)
        prefill_busy = True
        lat = enumerate_iteration(UNIT, UNIT_HW, "prefill", [spec[rid][1]])
        push(now + lat, PREFILL, rid)

    def start_step(now):
        nonlocal decode_busy, batch
        if decode_busy or not residents:
            return
        batch = [r for r in residents]
        lat = enumerate_iteration(UNIT, UNIT_HW, "decode",
                                  [kv + 1 for _, kv in batch])
        decode_busy = True
        push(now + lat, STEP, None)

    while events:
        now, kind, _, payload = heapq.heappop(events)
        if kind == ARRIVAL:
            queue.append(payload)
        elif kind == PREFILL:
            prefill_busy = False
            rid = payload
            _, p, o = spec[rid]
            if o == 1:
                emits[rid].append(now)
                done[rid] = now
            else:
                nbytes = kv_cache_bytes(UNIT["layers"], UNIT["d"], UNIT["h_kv"],
                                        UNIT["head_dim"], p)
                push(now + nbytes / UNIT_HW["b_c"], TRANSFER, rid)
        elif kind == TRANSFER:
            rid = payload
            residents.append([rid, spec[rid][1]])
            emits[rid].append(now)
        elif kind == STEP:
            decode_busy = False
            for entry in batch:
                rid = entry[0]
                entry[1] += 1
                emits[rid].append(now)
                if len(emits[rid]) == spec[rid][2]:
                    done[rid] = now
                    residents.remove(entry)
            batch = []
        start_prefill(now)
        start_step(now)
    return emits, done


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    emits, done = simulate(TRACE)
    rows = ["id,arrival,prompt_len,output_len,first_token_ts,completion_ts,tpot"]
    for rid, at, p, o in TRACE:
        ts = emits[rid]
        tpot = (ts[-1] - ts[0]) / (len(ts) - 1) if len(ts) > 1 else ""
        rows.append(f"{rid},{at!r},{p},{o},{ts[0]!r},{done[rid]!r},"
                    f"{tpot!r}" if tpot != "" else
                    f"{rid},{at!r},{p},{o},{ts[0]!r},{done[rid]!r},")
    (out / "pd_unit_oracle.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
