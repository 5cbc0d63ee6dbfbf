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
#include <vector>

#include "colosim/scheduler/mix_selection.h"
#include "colosim/scheduler/types.h"

namespace colosim {

struct MigrationInputs {
  std::vector<Candidate> prev_batch;
  bool all_residents_included = false;
  double slo_s = 0.1;
  double slo_margin = 0.1;
  std::optional<std::uint64_t> bs_sat;
  // KV tokens still available on the instance; a probed request of
  // length l fits iff l <= kv_free_tokens.
  std::uint64_t kv_free_tokens = 0;
  // Largest context length worth probing.
  std::uint64_t max_length = 1u << 17;
};

// Decides whether a strict instance should pull offline work, and which
// lengths it prefers. Probed requests are synthetic with context = l. Below
// the saturation batch, the probe is a group of (bs_sat - |B|) such
// requests, i.e. the additions needed to saturate.
LengthPreference migration_decision(const MigrationInputs& in,
                                    const BatchPredictor& predict);

}  // namespace colosim
