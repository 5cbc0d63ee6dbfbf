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

#include "colosim/metrics/request_metrics.h"

#include <algorithm>
#include <cmath>

namespace colosim {

namespace {

bool keep(const RequestRecord& r, ClassFilter filter) {
  switch (filter) {
    case ClassFilter::kAll: return true;
    case ClassFilter::kOnline: return r.cls == RequestClass::kOnline;
    case ClassFilter::kOffline: return r.cls == RequestClass::kOffline;
  }
  return true;
}

}  // namespace

std::optional<double> ttft(const RequestRecord& r) {
  if (r.tokens_emitted == 0 || r.first_token_ts < 0.0) return std::nullopt;
  return r.first_token_ts - r.arrival;
}

std::optional<double> tpot(const RequestRecord& r) {
  if (r.tokens_emitted < 2) return std::nullopt;
  return (r.last_token_ts - r.first_token_ts) / (r.tokens_emitted - 1);
}

bool violates(const RequestRecord& r, const SLOConfig& slo) {
  if (!r.complete()) return true;
  const auto t = ttft(r);
  if (!t || *t > slo.ttft_slo) return true;
  const auto p = tpot(r);
  return p && *p > slo.tpot_slo;
}

ViolationStats violation_stats(const MetricsLog& log, const SLOConfig& slo,
                               ClassFilter filter) {
  ViolationStats s;
  for (const RequestRecord& r : log.requests) {
    if (!keep(r, filter)) continue;
    ++s.considered;
    if (!r.complete()) ++s.in_flight;
    if (r.complete() && !tpot(r)) ++s.tpot_undefined;
    if (violates(r, slo)) ++s.violating;
  }
  return s;
}

double violation_rate(const MetricsLog& log, const SLOConfig& slo,
                      ClassFilter filter) {
  return violation_stats(log, slo, filter).rate();
}

double offline_goodput(const MetricsLog& log, double span_s) {
  if (!(span_s > 0.0)) return 0.0;
  double tokens = 0.0;
  for (const RequestRecord& r : log.requests) {
    if (r.cls == RequestClass::kOffline && r.complete()) tokens += r.output_len;
  }
  return tokens / span_s;
}

double completion_fraction(const MetricsLog& log, ClassFilter filter) {
  std::uint64_t total = 0, done = 0;
  for (const RequestRecord& r : log.requests) {
    if (!keep(r, filter)) continue;
    ++total;
    if (r.complete()) ++done;
  }
  return total == 0 ? 1.0 : static_cast<double>(done) / static_cast<double>(total);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
  const std::size_t idx =
      rank < 1.0 ? 0 : std::min(values.size() - 1, static_cast<std::size_t>(rank) - 1);
  return values[idx];
}

Summary summarize(const MetricsLog& log, const SLOConfig& slo) {
  Summary s;
  std::vector<double> ttfts, tpots, gaps;
  double tpot_sum = 0.0;
  for (const RequestRecord& r : log.requests) {
    if (r.cls == RequestClass::kOffline) {
      ++s.offline_requests;
      if (r.complete()) {
        ++s.offline_complete;
        s.offline_tokens += r.output_len;
      }
      continue;
    }
    ++s.online_requests;
    if (r.complete()) ++s.online_complete;
    if (const auto t = ttft(r)) {
      ttfts.push_back(*t);
    } else {
      ++s.ttft_undefined;
    }
    if (const auto p = tpot(r)) {
      tpots.push_back(*p);
      tpot_sum += *p;
    } else {
      ++s.tpot_undefined;
    }
    for (std::size_t k = 1; k < r.emit_ts.size(); ++k) {
      gaps.push_back(r.emit_ts[k] - r.emit_ts[k - 1]);
    }
  }
  s.online_violation_rate = violation_rate(log, slo, ClassFilter::kOnline);
  s.ttft_p50 = percentile(ttfts, 50.0);
  s.ttft_p99 = percentile(ttfts, 99.0);
  s.tpot_mean = tpots.empty() ? 0.0 : tpot_sum / static_cast<double>(tpots.size());
  s.tpot_p99 = percentile(tpots, 99.0);
  s.token_gap_p99 = percentile(std::move(gaps), 99.0);
  s.offline_goodput = offline_goodput(log, log.horizon_s);
  s.counts = log.counts;
  s.horizon_s = log.horizon_s;
  s.max_preemption_delay_s = log.max_preemption_delay_s;
  s.invariant_violations = log.invariant_violations.size();
  return s;
}

}  // namespace colosim
