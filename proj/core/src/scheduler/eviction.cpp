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

#include "colosim/scheduler/eviction.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace colosim {

namespace {

constexpr std::uint64_t kMaxTableCells = 1u << 22;

struct Cost {
  std::uint64_t recompute = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 0;
  bool operator<(const Cost& o) const {
    return recompute != o.recompute ? recompute < o.recompute : count < o.count;
  }
};

// Least recompute work covering `need` tokens: 0/1 covering knapsack over
// freed tokens capped at need.
std::vector<std::uint32_t> least_recompute(std::vector<EvictionCandidate> pool,
                                           std::uint64_t need) {
  const std::size_t n = pool.size();
  const std::size_t width = static_cast<std::size_t>(need) + 1;
  constexpr std::uint32_t kNotTaken = std::numeric_limits<std::uint32_t>::max();
  std::vector<Cost> best(width);
  best[0] = {0, 0};
  std::vector<std::uint32_t> parent(n * width, kNotTaken);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t w = pool[i].freed_tokens;
    for (std::size_t f = width; f-- > 0;) {
      if (best[f].recompute == std::numeric_limits<std::uint64_t>::max()) continue;
      const std::size_t nf = static_cast<std::size_t>(std::min<std::uint64_t>(need, f + w));
      if (nf == f) continue;
      const Cost cand{best[f].recompute + pool[i].recompute_tokens, best[f].count + 1};
      if (cand < best[nf]) {
        best[nf] = cand;
        parent[i * width + nf] = static_cast<std::uint32_t>(f);
      }
    }
  }
  // Walk back: the last item that improved a cell is the one on its path.
  std::vector<std::uint32_t> out;
  std::size_t f = width - 1;
  for (std::size_t i = n; i-- > 0 && f > 0;) {
    const std::uint32_t p = parent[i * width + f];
    if (p == kNotTaken) continue;
    out.push_back(pool[i].id);
    f = p;
  }
  return out;
}

std::vector<std::uint32_t> greedy_shortest(std::vector<EvictionCandidate> pool,
                                           std::uint64_t need) {
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    return a.recompute_tokens != b.recompute_tokens
               ? a.recompute_tokens < b.recompute_tokens
               : a.id < b.id;
  });
  std::vector<EvictionCandidate> chosen;
  std::uint64_t freed = 0;
  for (const auto& c : pool) {
    if (freed >= need) break;
    chosen.push_back(c);
    freed += c.freed_tokens;
  }
  // Drop victims that turned out unnecessary, largest first.
  for (std::size_t i = chosen.size(); i-- > 0;) {
    if (freed - chosen[i].freed_tokens >= need) {
      freed -= chosen[i].freed_tokens;
      chosen.erase(chosen.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  std::vector<std::uint32_t> out;
  for (const auto& c : chosen) out.push_back(c.id);
  return out;
}

}  // namespace

std::vector<std::uint32_t> select_eviction_victims(
    std::span<const EvictionCandidate> pool, std::uint64_t needed_bytes,
    BottleneckKind bottleneck, std::uint64_t bytes_per_token) {
  if (needed_bytes == 0) return {};
  if (bytes_per_token == 0) throw std::invalid_argument("bytes_per_token must be > 0");
  const std::uint64_t need = (needed_bytes + bytes_per_token - 1) / bytes_per_token;
  std::uint64_t total = 0;
  for (const auto& c : pool) total += c.freed_tokens;
  if (total < need) {
    throw std::invalid_argument("eviction pool frees " +
                                std::to_string(total * bytes_per_token) +
                                " bytes, less than the " +
                                std::to_string(needed_bytes) + " needed");
  }

  std::vector<EvictionCandidate> sorted(pool.begin(), pool.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<std::uint32_t> out;
  if (bottleneck == BottleneckKind::kComputeBound) {
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return a.freed_tokens > b.freed_tokens;
    });
    std::uint64_t freed = 0;
    for (const auto& c : sorted) {
      if (freed >= need) break;
      out.push_back(c.id);
      freed += c.freed_tokens;
    }
  } else if (sorted.size() * (need + 1) <= kMaxTableCells) {
    out = least_recompute(std::move(sorted), need);
  } else {
    out = greedy_shortest(std::move(sorted), need);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace colosim
