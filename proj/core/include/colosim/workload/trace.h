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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace colosim {

enum class RequestClass { kOnline, kOffline };

std::string_view to_string(RequestClass cls);

struct TraceRecord {
  double arrival_ts = 0.0;  // seconds from trace start
  std::uint32_t prompt_len = 1;
  std::uint32_t output_len = 1;
  RequestClass cls = RequestClass::kOnline;
  std::string id;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Records ordered by non-decreasing arrival_ts with unique ids.
struct Trace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
  double span_s() const {
    return records.empty() ? 0.0 : records.back().arrival_ts;
  }
  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class TraceFormat { kCsv, kJsonl };

// Picks the format from the extension (.jsonl / .json -> JSONL, else CSV).
TraceFormat trace_format_for(const std::filesystem::path& path);

// CSV needs a header naming arrival_ts, prompt_len, output_len and class
// (id is optional). Throws ConfigError with the offending line number.
Trace load_trace(const std::filesystem::path& path, TraceFormat format);
Trace load_trace(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& path, const Trace& trace,
                 TraceFormat format);
void write_trace(const std::filesystem::path& path, const Trace& trace);

// Sorts by arrival (stable) and enforces the record invariants.
void normalize_trace(Trace& trace);

// Keeps each record independently with probability keep_ratio.
Trace scale_down(const Trace& trace, double keep_ratio, std::uint64_t seed);

// Adds (factor - 1) x size replicas. Each record is replicated
// floor(factor - 1) times and the fractional remainder is drawn without
// replacement. A replica copies its source's lengths and lands uniformly
// inside the source's neighbourhood: midway to the previous arrival up to
// midway to the next one.
Trace scale_up(const Trace& trace, double factor, std::uint64_t seed);

// Uniform-rate offline arrivals start_ts + k / qps, cycling over `lengths`
// for prompt/output lengths.
Trace offline_stream(std::span<const TraceRecord> lengths, double qps,
                     double start_ts, std::size_t count);

// Request counts per bucket covering [0, last arrival].
std::vector<std::uint64_t> rate_histogram(const Trace& trace,
                                          double bucket_seconds);

void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<std::uint64_t>& counts,
                         double bucket_seconds);

}  // namespace colosim
