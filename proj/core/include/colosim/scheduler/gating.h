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

namespace colosim {

struct GatingInputs {
  std::uint64_t pool_size = 0;        // offline decoders already resident (b)
  double latency_b = 0.0;             // Decode step latency at b
  double latency_b_plus_1 = 0.0;      // ... with the candidate added
  double pool_remaining_tokens = 0.0;
  double p_evict = 0.0;
  double candidate_prefill_s = 0.0;   // recompute cost if it gets evicted
};

// Per-token latency saved across the pool's remaining tokens.
double gating_benefit(const GatingInputs& in);
double gating_cost(const GatingInputs& in);
// Admit iff benefit > cost; an empty pool always admits.
bool offline_gating(const GatingInputs& in);

// Sliding-window frequency of interruptions hitting offline work.
class PreemptionRisk {
 public:
  explicit PreemptionRisk(double window_s = 300.0) : window_s_(window_s) {}

  void record(double t);
  double rate(double now);  // events per second over the window
  // 1 - exp(-rate * residence_s)
  double p_evict(double now, double residence_s);
  void clear() { events_.clear(); }

 private:
  double window_s_;
  std::deque<double> events_;
};

}  // namespace colosim
