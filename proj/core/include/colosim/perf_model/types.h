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
#include <string_view>
#include <vector>

namespace colosim {

// Floating-point work and memory traffic of one operator.
struct OpCost {
  std::uint64_t flops = 0;
  std::uint64_t bytes = 0;

  OpCost& operator+=(const OpCost& other) {
    flops += other.flops;
    bytes += other.bytes;
    return *this;
  }
  friend bool operator==(const OpCost&, const OpCost&) = default;
};

// Achievable rates of one instance. Rates are what the roofline model
// actually sees (calibrated), not datasheet peaks.
struct HardwareProfile {
  double gemm_flops = 0.0;          // FLOP/s for GEMM
  double prefill_attn_flops = 0.0;  // FLOP/s for Prefill attention
  double decode_attn_flops = 0.0;   // FLOP/s for Decode attention
  double gemm_bw = 0.0;             // bytes/s for GEMM
  double attn_bw = 0.0;             // bytes/s for attention
  double prefill_overhead_s = 0.0;  // static per-iteration cost
  double decode_overhead_s = 0.0;
  double comm_bw = 0.0;  // bytes/s for collectives and KV transfer
  std::uint64_t kv_capacity_bytes = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  friend bool operator==(const HardwareProfile&, const HardwareProfile&) = default;
};

// Decoder-only transformer shape. hidden_dim = num_q_heads * head_dim.
struct ModelSpec {
  std::uint64_t num_layers = 0;
  std::uint64_t hidden_dim = 0;
  std::uint64_t num_q_heads = 0;
  std::uint64_t num_kv_heads = 0;
  std::uint64_t head_dim = 0;
  std::uint64_t mlp_intermediate_dim = 0;
  std::uint64_t vocab_dim = 0;
  std::uint64_t bytes_per_value = 2;
  std::uint64_t tp_degree = 1;

  void validate() const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

enum class Phase { kPrefill, kDecode };

std::string_view to_string(Phase phase);

// One iteration's work. For Prefill each entry is a request's token count
// (S_q = S_kv). For Decode each entry is a request's context length S_kv
// including the token being processed (S_q = 1).
struct BatchDescriptor {
  Phase phase = Phase::kDecode;
  std::vector<std::uint64_t> lengths;

  static BatchDescriptor prefill(std::vector<std::uint64_t> lengths) {
    return {Phase::kPrefill, std::move(lengths)};
  }
  static BatchDescriptor decode(std::vector<std::uint64_t> lengths) {
    return {Phase::kDecode, std::move(lengths)};
  }

  // Input rows seen by every GEMM in the iteration.
  std::uint64_t gemm_rows() const;
  std::uint64_t total_tokens() const;
};

enum class BottleneckKind {
  kComputeBound,
  kMemoryBandwidthBound,
  kMemoryCapacityBound,
};

std::string_view to_string(BottleneckKind kind);

// Per-category decomposition of one predicted iteration.
struct LatencyBreakdown {
  double gemm_s = 0.0;
  double attention_s = 0.0;
  double comm_s = 0.0;
  double overhead_s = 0.0;
  OpCost gemm_cost;  // aggregate over all GEMMs of the iteration

  double total() const { return gemm_s + attention_s + comm_s + overhead_s; }
};

}  // namespace colosim
