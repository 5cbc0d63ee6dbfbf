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
#include <deque>
#include <string_view>
#include <vector>

#include "colosim/perf_model/types.h"

namespace colosim {

enum class InstanceKind { kLatencyRelaxed, kLatencyStrict };

std::string_view to_string(InstanceKind kind);

enum class Activity { kIdle, kPrefill, kDecode };

// KV is accounted in tokens; bytes are tokens x bytes_per_token, which is
// exact because kv_cache_bytes is linear.
struct Instance {
  int id = 0;
  InstanceKind kind = InstanceKind::kLatencyStrict;
  HardwareProfile hw;
  std::uint64_t bytes_per_token = 1;

  std::uint64_t kv_used_tokens = 0;
  // Growth reservations of residents plus inbound transfers.
  std::uint64_t kv_reserved_tokens = 0;

  Activity activity = Activity::kIdle;
  std::uint64_t generation = 0;  // bumps invalidate scheduled completions
  std::uint32_t prefill_request = 0;
  double run_start = 0.0;
  double run_end = 0.0;
  double layer_latency = 0.0;
  std::uint32_t run_start_layer = 0;
  bool halting = false;
  std::uint32_t halt_layer = 0;
  double halt_time = 0.0;
  std::uint64_t step_growth = 0;  // tokens held for the running step
  std::uint32_t inbound = 0;      // transfers reserved towards this instance
  std::vector<std::uint32_t> batch;

  std::deque<std::uint32_t> online_prefill_q;
  std::deque<std::uint32_t> offline_prefill_q;
  std::vector<std::uint32_t> decoding;  // resident decoders, ascending index

  double busy_s = 0.0;        // accumulated since the last utilization sample
  double busy_since = 0.0;

  bool relaxed() const { return kind == InstanceKind::kLatencyRelaxed; }
  bool strict() const { return kind == InstanceKind::kLatencyStrict; }
  bool idle() const { return activity == Activity::kIdle; }
  std::uint64_t capacity_tokens() const {
    return hw.kv_capacity_bytes / bytes_per_token;
  }
  std::uint64_t kv_used_bytes() const { return kv_used_tokens * bytes_per_token; }
  std::uint64_t free_tokens() const {
    const std::uint64_t taken = kv_used_tokens + kv_reserved_tokens;
    return taken >= capacity_tokens() ? 0 : capacity_tokens() - taken;
  }

  void add_decoding(std::uint32_t request);
  void remove_decoding(std::uint32_t request);
  bool has_decoding(std::uint32_t request) const;
};

}  // namespace colosim
