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
#include <span>
#include <vector>

#include "colosim/perf_model/types.h"

namespace colosim {

struct EvictionCandidate {
  std::uint32_t id = 0;
  std::uint64_t freed_tokens = 0;      // KV released by evicting it
  std::uint64_t recompute_tokens = 0;  // Prefill length when it comes back
};

// Compute bound: fewest victims, longest first. Otherwise: the set with the
// least recompute work that still frees enough. Ties go to lower ids.
// Throws std::invalid_argument when the whole pool cannot cover the need.
std::vector<std::uint32_t> select_eviction_victims(
    std::span<const EvictionCandidate> pool, std::uint64_t needed_bytes,
    BottleneckKind bottleneck, std::uint64_t bytes_per_token);

}  // namespace colosim
