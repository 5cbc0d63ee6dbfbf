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

#include "colosim/metrics/metrics_log.h"
#include "colosim/scheduler/types.h"

namespace colosim {

// nullopt before the first token.
std::optional<double> ttft(const RequestRecord& r);
// Mean inter-token gap after the first token; nullopt below two tokens.
std::optional<double> tpot(const RequestRecord& r);

enum class ClassFilter { kAll, kOnline, kOffline };

struct ViolationStats {
  std::uint64_t considered = 0;
  std::uint64_t violating = 0;
  std::uint64_t in_flight = 0;        // counted as violating
  std::uint64_t tpot_undefined = 0;   // complete with a single token

  double rate() const {
    return considered == 0 ? 0.0
                           : static_cast<double>(violating) /
                                 static_cast<double>(considered);
  }
};

bool violates(const RequestRecord& r, const SLOConfig& slo);
ViolationStats violation_stats(const MetricsLog& log, const SLOConfig& slo,
                               ClassFilter filter);
double violation_rate(const MetricsLog& log, const SLOConfig& slo,
                      ClassFilter filter);

// Output tokens of complete offline requests per second of `span_s`.
double offline_goodput(const MetricsLog& log, double span_s);
double completion_fraction(const MetricsLog& log, ClassFilter filter);

// Nearest-rank percentile; 0 for an empty input.
double percentile(std::vector<double> values, double p);

struct Summary {
  std::uint64_t online_requests = 0;
  std::uint64_t offline_requests = 0;
  std::uint64_t online_complete = 0;
  std::uint64_t offline_complete = 0;
  double online_violation_rate = 0.0;
  double ttft_p50 = 0.0;
  double ttft_p99 = 0.0;
  double tpot_mean = 0.0;
  double tpot_p99 = 0.0;
  double token_gap_p99 = 0.0;  // per-token, online; needs emit timestamps
  std::uint64_t ttft_undefined = 0;
  std::uint64_t tpot_undefined = 0;
  double offline_goodput = 0.0;  // tokens/s over the horizon
  std::uint64_t offline_tokens = 0;
  EventCounts counts;
  double horizon_s = 0.0;
  double max_preemption_delay_s = 0.0;
  std::uint64_t invariant_violations = 0;
};

Summary summarize(const MetricsLog& log, const SLOConfig& slo);

}  // namespace colosim
