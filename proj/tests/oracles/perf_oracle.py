#!/usr/bin/env python3
"""Independent arithmetic oracle for the roofline cost formulas.

Generates frozen fixtures consumed by the C++ tests. Integer formulas are
evaluated with Python big ints; latencies are plain IEEE doubles, evaluated
in the same operation order as the formula text.

Usage: python3 perf_oracle.py <out_dir>
"""

import random
import sys
from pathlib import Path


def gemm_cost(n, d_in, d_out, d):
    return 2 * n * d_in * d_out, d * (n * d_in + d_in * d_out + n * d_out)


def attention_cost(s_q, s_kv, d_h, h_q, h_kv, d):
    assert h_q % h_kv == 0
    return 4 * d_h * s_q * s_kv, 2 * d * (s_q * d_h + s_kv * d_h * (h_q // h_kv))


def kv_cache_bytes(layers, d, h_kv, head_dim, tokens):
    return 2 * d * layers * tokens * h_kv * head_dim


def op_latency(flops, nbytes, f, m):
    return max(flops / f, nbytes / m)


def write_formula_cases(path, rng, count=1000):
    lines = ["kind,a0,a1,a2,a3,a4,a5,expect_flops,expect_bytes,expect_seconds"]
    for _ in range(count):
        n = rng.randint(0, 65536)
        d_in = rng.randint(1, 65536)
        d_out = rng.randint(1, 200000)
        d = rng.choice([1, 2, 4])
        fl, by = gemm_cost(n, d_in, d_out, d)
        lines.append(f"gemm,{n},{d_in},{d_out},{d},0,0,{fl},{by},0")
    for _ in range(count):
        h_kv = rng.randint(1, 16)
        h_q = h_kv * rng.randint(1, 16)
        head_dim = rng.choice([64, 80, 96, 128, 256])
        d_h = h_q * head_dim
        s_q = rng.randint(1, 32768)
        s_kv = rng.randint(1, 131072)
        d = rng.choice([1, 2, 4])
        fl, by = attention_cost(s_q, s_kv, d_h, h_q, h_kv, d)
        lines.append(f"attention,{s_q},{s_kv},{d_h},{h_q},{h_kv},{d},{fl},{by},0")
    for _ in range(count):
        layers = rng.randint(1, 128)
        d = rng.choice([1, 2, 4])
        h_kv = rng.randint(1, 64)
        head_dim = rng.choice([64, 128, 256])
        tokens = rng.randint(0, 1 << 20)
        by = kv_cache_bytes(layers, d, h_kv, head_dim, tokens)
        lines.append(f"kv,{layers},{d},{h_kv},{head_dim},{tokens},0,0,{by},0")
    for _ in range(count):
        flops = rng.randint(0, 10**15)
        nbytes = rng.randint(0, 10**12)
        f = rng.uniform(1e9, 1e15)
        m = rng.uniform(1e9, 1e13)
        sec = op_latency(flops, nbytes, f, m)
        lines.append(f"latency,{flops},{nbytes},{f!r},{m!r},0,0,0,0,{sec!r}")
    path.write_text("\n".join(lines) + "\n")


# Model and profile literals shared with tests/unit/perf_model_test.cpp.
QWEN7B = dict(layers=28, hidden=3584, h_q=28, h_kv=4, head_dim=128,
              mlp=18944, vocab=152064, d=2, tp=1)
PROFILE = dict(f_g=3.4e14, f_ap=2.2e14, f_ad=8.0e13, m_g=1.25e12, m_a=2.0e13,
               o_p=0.012, o_d=0.006, b_c=2.5e10)


def enumerate_iteration(model, hw, phase, lengths):
    """Brute-force operator list for one iteration; returns total seconds."""
    tp = model["tp"]
    d = model["d"]
    hidden = model["hidden"]
    head_dim = model["head_dim"]
    if phase == "prefill":
        n = sum(lengths)
        attn = [(s, s) for s in lengths]
        f_attn = hw["f_ap"]
        overhead = hw["o_p"]
    else:
        n = len(lengths)
        attn = [(1, s) for s in lengths]
        f_attn = hw["f_ad"]
        overhead = hw["o_d"]
    ops = []
    for _layer in range(model["layers"]):
        qkv_out = (model["h_q"] + 2 * model["h_kv"]) * head_dim // tp
        ops.append(("gemm",) + gemm_cost(n, hidden, qkv_out, d))
        for s_q, s_kv in attn:
            ops.append(("attn",) + attention_cost(
                s_q, s_kv, hidden // tp, model["h_q"] // tp,
                model["h_kv"] // tp, d))
        ops.append(("gemm",) + gemm_cost(n, hidden // tp, hidden, d))
        ops.append(("gemm",) + gemm_cost(n, hidden, 2 * model["mlp"] // tp, d))
        ops.append(("gemm",) + gemm_cost(n, model["mlp"] // tp, hidden, d))
        if tp > 1:
            ops.append(("comm", 0, d * n * hidden))
            ops.append(("comm", 0, d * n * hidden))
    ops.append(("gemm",) + gemm_cost(n, hidden, model["vocab"] // tp, d))
    total = 0.0
    for kind, fl, by in ops:
        if kind == "gemm":
            total += op_latency(fl, by, hw["f_g"], hw["m_g"])
        elif kind == "attn":
            total += op_latency(fl, by, f_attn, hw["m_a"])
        else:
            total += by / hw["b_c"]
    return total + overhead


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240917)
    write_formula_cases(out / "formula_cases.csv", rng)

    rows = ["name,seconds"]
    rows.append("qwen7b_prefill_2048,%r" %
                enumerate_iteration(QWEN7B, PROFILE, "prefill", [2048]))
    rows.append("qwen7b_decode_64x1024,%r" %
                enumerate_iteration(QWEN7B, PROFILE, "decode", [1024] * 64))
    rows.append("qwen7b_decode_mixed,%r" %
                enumerate_iteration(QWEN7B, PROFILE, "decode",
                                    [17, 256, 4000, 1024, 9]))
    tp4 = dict(QWEN7B, tp=4)
    rows.append("qwen7b_tp4_prefill_512,%r" %
                enumerate_iteration(tp4, PROFILE, "prefill", [512]))
    (out / "iteration_oracle.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
