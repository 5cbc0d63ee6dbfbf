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

#include "colosim/perf_model/roofline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace colosim {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

struct GemmShape {
  std::uint64_t d_in;
  std::uint64_t d_out;
};

// Per-layer GEMMs of a decoder layer, sharded across tp_degree ranks.
std::array<GemmShape, 4> layer_gemms(const ModelSpec& m) {
  const std::uint64_t tp = m.tp_degree;
  return {{
      {m.hidden_dim, (m.num_q_heads + 2 * m.num_kv_heads) * m.head_dim / tp},
      {m.hidden_dim / tp, m.hidden_dim},
      {m.hidden_dim, 2 * m.mlp_intermediate_dim / tp},
      {m.mlp_intermediate_dim / tp, m.hidden_dim},
  }};
}

GemmShape logits_gemm(const ModelSpec& m) {
  return {m.hidden_dim, m.vocab_dim / m.tp_degree};
}

OpCost attention_shard_cost(const ModelSpec& m, std::uint64_t s_q,
                            std::uint64_t s_kv) {
  const std::uint64_t tp = m.tp_degree;
  return attention_cost(s_q, s_kv, m.hidden_dim / tp, m.num_q_heads / tp,
                        m.num_kv_heads / tp, m.bytes_per_value);
}

// GEMM latency and aggregate cost of one iteration with `rows` input rows.
void add_gemms(const ModelSpec& m, const HardwareProfile& hw,
               std::uint64_t rows, LatencyBreakdown& out) {
  double layer_s = 0.0;
  OpCost layer_cost;
  for (const GemmShape& g : layer_gemms(m)) {
    const OpCost c = gemm_cost(rows, g.d_in, g.d_out, m.bytes_per_value);
    layer_s += op_latency(c, hw.gemm_flops, hw.gemm_bw);
    layer_cost += c;
  }
  const GemmShape lg = logits_gemm(m);
  const OpCost logits = gemm_cost(rows, lg.d_in, lg.d_out, m.bytes_per_value);
  out.gemm_s += layer_s * static_cast<double>(m.num_layers) +
                op_latency(logits, hw.gemm_flops, hw.gemm_bw);
  out.gemm_cost.flops += layer_cost.flops * m.num_layers + logits.flops;
  out.gemm_cost.bytes += layer_cost.bytes * m.num_layers + logits.bytes;
}

void add_comm(const ModelSpec& m, const HardwareProfile& hw,
              std::uint64_t rows, LatencyBreakdown& out) {
  if (m.tp_degree <= 1) return;
  const std::uint64_t volume = m.bytes_per_value * rows * m.hidden_dim;
  out.comm_s += 2.0 * static_cast<double>(m.num_layers) *
                comm_latency(volume, hw.comm_bw);
}

bool gemms_compute_bound(const ModelSpec& m, const HardwareProfile& hw,
                         std::uint64_t rows) {
  LatencyBreakdown b;
  add_gemms(m, hw, rows, b);
  const double compute = static_cast<double>(b.gemm_cost.flops) / hw.gemm_flops;
  const double memory = static_cast<double>(b.gemm_cost.bytes) / hw.gemm_bw;
  return compute >= memory;
}

}  // namespace

std::string_view to_string(Phase phase) {
  return phase == Phase::kPrefill ? "prefill" : "decode";
}

std::string_view to_string(BottleneckKind kind) {
  switch (kind) {
    case BottleneckKind::kComputeBound:
      return "compute";
    case BottleneckKind::kMemoryBandwidthBound:
      return "memory_bandwidth";
    case BottleneckKind::kMemoryCapacityBound:
      return "memory_capacity";
  }
  return "unknown";
}

void HardwareProfile::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string("hardware.") + name +
                                  " must be > 0");
    }
  };
  positive(gemm_flops, "gemm_flops");
  positive(prefill_attn_flops, "prefill_attn_flops");
  positive(decode_attn_flops, "decode_attn_flops");
  positive(gemm_bw, "gemm_bw");
  positive(attn_bw, "attn_bw");
  positive(comm_bw, "comm_bw");
  if (!(prefill_overhead_s >= 0.0)) {
    throw std::invalid_argument("hardware.prefill_overhead_s must be >= 0");
  }
  if (!(decode_overhead_s >= 0.0)) {
    throw std::invalid_argument("hardware.decode_overhead_s must be >= 0");
  }
  if (kv_capacity_bytes == 0) {
    throw std::invalid_argument("hardware.kv_capacity_bytes must be > 0");
  }
}

void ModelSpec::validate() const {
  const auto nonzero = [](std::uint64_t v, const char* name) {
    if (v == 0) {
      throw std::invalid_argument(std::string("model.") + name +
                                  " must be >= 1");
    }
  };
  nonzero(num_layers, "num_layers");
  nonzero(hidden_dim, "hidden_dim");
  nonzero(num_q_heads, "num_q_heads");
  nonzero(num_kv_heads, "num_kv_heads");
  nonzero(head_dim, "head_dim");
  nonzero(mlp_intermediate_dim, "mlp_intermediate_dim");
  nonzero(vocab_dim, "vocab_dim");
  nonzero(bytes_per_value, "bytes_per_value");
  nonzero(tp_degree, "tp_degree");
  if (num_q_heads % num_kv_heads != 0) {
    throw std::invalid_argument(
        "model.num_q_heads must be divisible by model.num_kv_heads");
  }
  if (hidden_dim != num_q_heads * head_dim) {
    throw std::invalid_argument(
        "model.hidden_dim must equal num_q_heads * head_dim");
  }
  if (num_kv_heads % tp_degree != 0 ||
      mlp_intermediate_dim % tp_degree != 0 || vocab_dim % tp_degree != 0) {
    throw std::invalid_argument(
        "model.tp_degree must divide num_kv_heads, mlp_intermediate_dim and "
        "vocab_dim");
  }
}

std::uint64_t BatchDescriptor::gemm_rows() const {
  return phase == Phase::kPrefill ? total_tokens() : lengths.size();
}

std::uint64_t BatchDescriptor::total_tokens() const {
  return std::accumulate(lengths.begin(), lengths.end(), std::uint64_t{0});
}

OpCost gemm_cost(std::uint64_t rows, std::uint64_t d_in, std::uint64_t d_out,
                 std::uint64_t bytes_per_value) {
  return {2 * rows * d_in * d_out,
          bytes_per_value * (rows * d_in + d_in * d_out + rows * d_out)};
}

OpCost attention_cost(std::uint64_t s_q, std::uint64_t s_kv,
                      std::uint64_t attn_dim, std::uint64_t q_heads,
                      std::uint64_t kv_heads, std::uint64_t bytes_per_value) {
  require(kv_heads > 0 && q_heads % kv_heads == 0,
          "attention_cost: q_heads must be a multiple of kv_heads");
  const std::uint64_t group = q_heads / kv_heads;
  return {4 * attn_dim * s_q * s_kv,
          2 * bytes_per_value * (s_q * attn_dim + s_kv * attn_dim * group)};
}

double op_latency(const OpCost& cost, double achievable_flops,
                  double achievable_bw) {
  return std::max(static_cast<double>(cost.flops) / achievable_flops,
                  static_cast<double>(cost.bytes) / achievable_bw);
}

double comm_latency(std::uint64_t bytes, double comm_bw) {
  return static_cast<double>(bytes) / comm_bw;
}

std::uint64_t kv_cache_bytes(const ModelSpec& model,
                             std::uint64_t total_tokens) {
  return 2 * model.bytes_per_value * model.num_layers * total_tokens *
         model.num_kv_heads * model.head_dim;
}

LatencyBreakdown estimate_iteration(const ModelSpec& model,
                                    const HardwareProfile& hw,
                                    const BatchDescriptor& batch) {
  require(!batch.lengths.empty(), "iteration batch must be non-empty");
  for (std::uint64_t len : batch.lengths) {
    require(len >= 1, "iteration batch lengths must be >= 1");
  }
  LatencyBreakdown out;
  const std::uint64_t rows = batch.gemm_rows();
  add_gemms(model, hw, rows, out);
  add_comm(model, hw, rows, out);

  const bool prefill = batch.phase == Phase::kPrefill;
  const double attn_flops =
      prefill ? hw.prefill_attn_flops : hw.decode_attn_flops;
  double layer_attn = 0.0;
  for (std::uint64_t len : batch.lengths) {
    const OpCost c = attention_shard_cost(model, prefill ? len : 1, len);
    layer_attn += op_latency(c, attn_flops, hw.attn_bw);
  }
  out.attention_s = layer_attn * static_cast<double>(model.num_layers);
  out.overhead_s = prefill ? hw.prefill_overhead_s : hw.decode_overhead_s;
  return out;
}

double estimate_decode_latency(const ModelSpec& model,
                               const HardwareProfile& hw,
                               const std::uint64_t* lengths,
                               std::size_t count) {
  require(count > 0, "iteration batch must be non-empty");
  LatencyBreakdown out;
  add_gemms(model, hw, count, out);
  add_comm(model, hw, count, out);
  double layer_attn = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const OpCost c = attention_shard_cost(model, 1, lengths[i]);
    layer_attn += op_latency(c, hw.decode_attn_flops, hw.attn_bw);
  }
  out.attention_s = layer_attn * static_cast<double>(model.num_layers);
  out.overhead_s = hw.decode_overhead_s;
  return out.total();
}

double predict_iteration_latency(const ModelSpec& model,
                                 const HardwareProfile& hw,
                                 const BatchDescriptor& batch) {
  const LatencyBreakdown b = estimate_iteration(model, hw, batch);
  const std::uint64_t footprint = kv_cache_bytes(model, batch.total_tokens());
  if (footprint > hw.kv_capacity_bytes) {
    throw std::invalid_argument(
        "iteration KV footprint " + std::to_string(footprint) +
        " bytes exceeds instance capacity " +
        std::to_string(hw.kv_capacity_bytes));
  }
  return b.total();
}

BottleneckKind classify_bottleneck(const ModelSpec& model,
                                   const HardwareProfile& hw,
                                   const BatchDescriptor& batch,
                                   double capacity_threshold) {
  require(!batch.lengths.empty(), "classify_bottleneck: empty batch");
  const double footprint =
      static_cast<double>(kv_cache_bytes(model, batch.total_tokens()));
  if (footprint >=
      capacity_threshold * static_cast<double>(hw.kv_capacity_bytes)) {
    return BottleneckKind::kMemoryCapacityBound;
  }
  return gemms_compute_bound(model, hw, batch.gemm_rows())
             ? BottleneckKind::kComputeBound
             : BottleneckKind::kMemoryBandwidthBound;
}

std::optional<std::uint64_t> compute_saturated_batch_size(
    const ModelSpec& model, const HardwareProfile& hw) {
  // Aggregate GEMM traffic is affine in the row count N:
  //   compute(N) = 2 N W / F,  memory(N) = d (N IO + W) / M
  // with W = sum(d_in * d_out) and IO = sum(d_in + d_out).
  double weights = 0.0;
  double io = 0.0;
  for (const GemmShape& g : layer_gemms(model)) {
    weights += static_cast<double>(g.d_in * g.d_out) *
               static_cast<double>(model.num_layers);
    io += static_cast<double>(g.d_in + g.d_out) *
          static_cast<double>(model.num_layers);
  }
  const GemmShape lg = logits_gemm(model);
  weights += static_cast<double>(lg.d_in * lg.d_out);
  io += static_cast<double>(lg.d_in + lg.d_out);

  const double d = static_cast<double>(model.bytes_per_value);
  const double slope = 2.0 * weights / hw.gemm_flops - d * io / hw.gemm_bw;
  if (!(slope > 0.0)) return std::nullopt;
  const double estimate = std::ceil(d * weights / hw.gemm_bw / slope);
  if (!std::isfinite(estimate) ||
      estimate > static_cast<double>(kMaxSaturationBatch)) {
    return std::nullopt;
  }

  // Settle on the exact flip of the same predicate classify_bottleneck uses.
  std::uint64_t n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(estimate));
  while (n > 1 && gemms_compute_bound(model, hw, n - 1)) --n;
  while (!gemms_compute_bound(model, hw, n)) {
    if (++n > kMaxSaturationBatch) return std::nullopt;
  }
  return n;
}

}  // namespace colosim
