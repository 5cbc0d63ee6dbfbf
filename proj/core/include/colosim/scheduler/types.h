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

namespace colosim {

struct SLOConfig {
  double ttft_slo = 5.0;    // seconds
  double tpot_slo = 0.1;    // S, seconds
  double violation_threshold = 0.03;
  double slo_margin = 0.1;  // fraction of S kept free before pulling work

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const SLOConfig&, const SLOConfig&) = default;
};

// Length preference a strict instance attaches to a pull request.
struct LengthPreference {
  enum class Mode { kNone, kMaxLenWithin, kShortest };
  Mode mode = Mode::kNone;
  std::uint64_t limit = 0;  // context tokens, for kMaxLenWithin

  static LengthPreference none() { return {}; }
  static LengthPreference shortest() { return {Mode::kShortest, 0}; }
  static LengthPreference max_len_within(std::uint64_t limit) {
    return {Mode::kMaxLenWithin, limit};
  }
  bool is_none() const { return mode == Mode::kNone; }
  friend bool operator==(const LengthPreference&, const LengthPreference&) = default;
};

std::string_view to_string(LengthPreference::Mode mode);

}  // namespace colosim
