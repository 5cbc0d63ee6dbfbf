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
#include <string>
#include <vector>

#include "colosim/workload/trace.h"

namespace colosim {

struct RequestRecord {
  std::string id;
  RequestClass cls = RequestClass::kOnline;
  double arrival = 0.0;
  std::uint32_t prompt_len = 0;
  std::uint32_t output_len = 0;
  double first_token_ts = -1.0;  // < 0 when no token was emitted
  double completion_ts = -1.0;   // < 0 when still in flight at the horizon
  double last_token_ts = -1.0;
  double max_token_gap = 0.0;
  std::uint32_t tokens_emitted = 0;
  std::vector<double> emit_ts;  // empty unless timestamps were kept
  std::uint32_t evictions = 0;
  std::uint32_t migrations = 0;
  std::uint32_t preemptions = 0;

  bool complete() const { return completion_ts >= 0.0; }
  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

struct UtilizationSample {
  double t = 0.0;  // end of the sampled interval
  int instance = 0;
  double busy_fraction = 0.0;
  double kv_occupancy = 0.0;  // used bytes / capacity at t
  friend bool operator==(const UtilizationSample&, const UtilizationSample&) = default;
};

struct EventCounts {
  std::uint64_t events = 0;
  std::uint64_t prefills = 0;
  std::uint64_t decode_steps = 0;
  std::uint64_t preemptions = 0;
  std::uint64_t evictions = 0;
  std::uint64_t migrations = 0;  // pull migrations of offline work
  std::uint64_t transfers = 0;   // every KV copy, pushes included
  std::uint64_t pull_signals = 0;
  std::uint64_t prefill_tokens = 0;
  std::uint64_t recompute_tokens = 0;
  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

struct MetricsLog {
  std::vector<RequestRecord> requests;  // merged arrival order
  std::vector<UtilizationSample> utilization;
  EventCounts counts;
  double horizon_s = 0.0;
  double max_preemption_delay_s = 0.0;
  std::vector<std::string> invariant_violations;

  friend bool operator==(const MetricsLog&, const MetricsLog&) = default;
};

}  // namespace colosim
