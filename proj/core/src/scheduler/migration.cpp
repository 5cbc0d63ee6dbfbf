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

#include "colosim/scheduler/migration.h"

#include <algorithm>
#include <limits>

namespace colosim {

namespace {

constexpr std::uint32_t kProbeId = std::numeric_limits<std::uint32_t>::max();

}  // namespace

LengthPreference migration_decision(const MigrationInputs& in,
                                    const BatchPredictor& predict) {
  const double slo = in.slo_s;
  const double current = in.prev_batch.empty() ? 0.0 : predict(in.prev_batch);
  if (!in.all_residents_included || !(current < slo * (1.0 - in.slo_margin))) {
    return LengthPreference::none();
  }

  std::vector<Candidate> probe;
  const auto latency_with = [&](std::uint64_t len, std::uint64_t copies) {
    probe.assign(in.prev_batch.begin(), in.prev_batch.end());
    probe.insert(probe.end(), copies, Candidate{kProbeId, len});
    return predict(probe);
  };
  // Largest l in [1, cap] keeping the probe within S.
  const auto max_length = [&](std::uint64_t copies,
                              std::uint64_t cap) -> std::uint64_t {
    if (cap < 1 || latency_with(1, copies) > slo) return 0;
    std::uint64_t lo = 1, hi = cap;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (latency_with(mid, copies) <= slo) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  };

  if (!in.bs_sat) return LengthPreference::shortest();
  const std::uint64_t bs = in.prev_batch.size();
  if (bs >= *in.bs_sat) {
    const std::uint64_t l =
        max_length(1, std::min(in.max_length, in.kv_free_tokens));
    return l > 0 ? LengthPreference::max_len_within(l) : LengthPreference::none();
  }
  const std::uint64_t l = max_length(*in.bs_sat - bs, in.max_length);
  return l > 0 ? LengthPreference::max_len_within(l) : LengthPreference::shortest();
}

}  // namespace colosim
