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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "colosim/workload/trace.h"

namespace colosim {

Trace scale_down(const Trace& trace, double keep_ratio, std::uint64_t seed) {
  if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) {
    throw std::invalid_argument("scale_down: keep_ratio must be in (0, 1]");
  }
  if (keep_ratio == 1.0) return trace;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Trace out;
  for (const TraceRecord& r : trace.records) {
    if (coin(rng) < keep_ratio) out.records.push_back(r);
  }
  return out;
}

Trace scale_up(const Trace& trace, double factor, std::uint64_t seed) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scale_up: factor must be >= 1");
  }
  const std::size_t n = trace.size();
  if (factor == 1.0 || n == 0) return trace;

  std::mt19937_64 rng(seed);
  const double extra = factor - 1.0;
  const auto whole = static_cast<std::size_t>(std::floor(extra));
  const auto partial =
      static_cast<std::size_t>(std::llround((extra - std::floor(extra)) * n));

  std::vector<std::size_t> copies(n, whole);
  if (partial > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < std::min(partial, n); ++k) ++copies[order[k]];
  }

  const auto& src = trace.records;
  Trace out;
  out.records.reserve(n + whole * n + partial);
  out.records = src;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = src[i].arrival_ts;
    const double lo = i == 0 ? t : 0.5 * (src[i - 1].arrival_ts + t);
    const double hi = i + 1 == n ? t : 0.5 * (t + src[i + 1].arrival_ts);
    std::uniform_real_distribution<double> jitter(lo, std::max(lo, hi));
    for (std::size_t k = 0; k < copies[i]; ++k) {
      TraceRecord replica = src[i];
      replica.arrival_ts = hi > lo ? jitter(rng) : lo;
      replica.id = src[i].id + "~r" + std::to_string(k + 1);
      out.records.push_back(std::move(replica));
    }
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const TraceRecord& a, const TraceRecord& b) {
                     return a.arrival_ts < b.arrival_ts;
                   });
  return out;
}

Trace offline_stream(std::span<const TraceRecord> lengths, double qps,
                     double start_ts, std::size_t count) {
  if (!(qps > 0.0)) {
    throw std::invalid_argument("offline_stream: qps must be > 0");
  }
  Trace out;
  if (count == 0) return out;
  if (lengths.empty()) {
    throw std::invalid_argument("offline_stream: no length records");
  }
  out.records.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const TraceRecord& src = lengths[k % lengths.size()];
    TraceRecord r;
    r.arrival_ts = start_ts + static_cast<double>(k) / qps;
    r.prompt_len = src.prompt_len;
    r.output_len = src.output_len;
    r.cls = RequestClass::kOffline;
    r.id = "off-" + std::to_string(k);
    out.records.push_back(std::move(r));
  }
  return out;
}

std::vector<std::uint64_t> rate_histogram(const Trace& trace,
                                          double bucket_seconds) {
  if (!(bucket_seconds > 0.0)) {
    throw std::invalid_argument("rate_histogram: bucket must be > 0");
  }
  if (trace.empty()) return {};
  double last = 0.0;
  for (const TraceRecord& r : trace.records) last = std::max(last, r.arrival_ts);
  std::vector<std::uint64_t> counts(
      static_cast<std::size_t>(std::floor(last / bucket_seconds)) + 1, 0);
  for (const TraceRecord& r : trace.records) {
    ++counts[static_cast<std::size_t>(std::floor(r.arrival_ts / bucket_seconds))];
  }
  return counts;
}

}  // namespace colosim
