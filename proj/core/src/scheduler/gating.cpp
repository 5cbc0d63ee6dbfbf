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

#include "colosim/scheduler/gating.h"

#include <cmath>
#include <limits>

namespace colosim {

double gating_benefit(const GatingInputs& in) {
  if (in.pool_size == 0) return std::numeric_limits<double>::infinity();
  const double b = static_cast<double>(in.pool_size);
  const double per_token_now = in.latency_b / b;
  const double per_token_next = in.latency_b_plus_1 / (b + 1.0);
  return (per_token_now - per_token_next) * in.pool_remaining_tokens;
}

double gating_cost(const GatingInputs& in) {
  return in.p_evict * in.candidate_prefill_s;
}

bool offline_gating(const GatingInputs& in) {
  return in.pool_size == 0 || gating_benefit(in) > gating_cost(in);
}

void PreemptionRisk::record(double t) { events_.push_back(t); }

double PreemptionRisk::rate(double now) {
  while (!events_.empty() && events_.front() < now - window_s_) events_.pop_front();
  return static_cast<double>(events_.size()) / window_s_;
}

double PreemptionRisk::p_evict(double now, double residence_s) {
  return 1.0 - std::exp(-rate(now) * residence_s);
}

}  // namespace colosim
