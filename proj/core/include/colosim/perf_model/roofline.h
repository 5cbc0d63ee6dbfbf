/* Copyright 2026 The colosim Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <optional>

#include "colosim/perf_model/types.h"

namespace colosim {

// Operator cost formulas. All integer arithmetic is exact.
OpCost gemm_cost(std::uint64_t rows, std::uint64_t d_in, std::uint64_t d_out,
                 std::uint64_t bytes_per_value);

// Fused attention: the score matrix stays on chip, so only Q/O and the K/V
// streams count as traffic. Throws if q_heads is not a multiple of kv_heads.
OpCost attention_cost(std::uint64_t s_q, std::uint64_t s_kv,
                      std::uint64_t attn_dim, std::uint64_t q_heads,
                      std::uint64_t kv_heads, std::uint64_t bytes_per_value);

// Roofline: max(flops / achievable_flops, bytes / achievable_bw).
double op_latency(const OpCost& cost, double achievable_flops,
                  double achievable_bw);

double comm_latency(std::uint64_t bytes, double comm_bw);

// Logical (unsharded) KV footprint of `total_tokens` cached tokens.
std::uint64_t kv_cache_bytes(const ModelSpec& model,
                             std::uint64_t total_tokens);

// Sum of operator latencies plus the phase overhead. Rejects empty batches,
// zero lengths and batches whose KV footprint exceeds the instance pool.
double predict_iteration_latency(const ModelSpec& model,
                                 const HardwareProfile& hw,
                                 const BatchDescriptor& batch);

// Same enumeration without the capacity check; for schedulers probing
// hypothetical batches.
LatencyBreakdown estimate_iteration(const ModelSpec& model,
                                    const HardwareProfile& hw,
                                    const BatchDescriptor& batch);

// Decode latency of `lengths` without allocating a BatchDescriptor.
double estimate_decode_latency(const ModelSpec& model,
                               const HardwareProfile& hw,
                               const std::uint64_t* lengths,
                               std::size_t count);

BottleneckKind classify_bottleneck(const ModelSpec& model,
                                   const HardwareProfile& hw,
                                   const BatchDescriptor& batch,
                                   double capacity_threshold = 1.0);

// Largest batch size the saturation search will consider.
inline constexpr std::uint64_t kMaxSaturationBatch = 1u << 24;

// Smallest Decode batch size whose aggregate GEMM compute time reaches its
// GEMM memory time. nullopt when GEMMs never saturate (or only beyond
// kMaxSaturationBatch).
std::optional<std::uint64_t> compute_saturated_batch_size(
    const ModelSpec& model, const HardwareProfile& hw);

}  // namespace colosim
