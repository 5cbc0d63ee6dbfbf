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

#include "colosim/scheduler/mix_selection.h"

#include <algorithm>

namespace colosim {

std::vector<Candidate> mix_decoding_selection(
    std::span<const Candidate> online, std::span<const Candidate> offline,
    double slo_s, const BatchPredictor& predict, std::size_t k_random,
    std::mt19937_64& rng, OverloadMode mode) {
  const auto latency = [&](const std::vector<Candidate>& b) {
    return b.empty() ? 0.0 : predict(b);
  };

  std::vector<Candidate> batch(online.begin(), online.end());
  if (latency(batch) > slo_s) {
    if (mode == OverloadMode::kBestEffort) return batch;
    std::sort(batch.begin(), batch.end(),
              [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
    while (!batch.empty() && latency(batch) > slo_s) batch.pop_back();
  }
  if (offline.empty()) return batch;

  std::vector<Candidate> pool(offline.begin(), offline.end());
  const std::size_t tested = std::min(k_random, pool.size());
  for (std::size_t i = 0; i < tested; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    batch.push_back(pool[i]);
    if (latency(batch) > slo_s) batch.pop_back();
  }
  if (tested == pool.size() || !(latency(batch) < slo_s)) return batch;

  std::vector<Candidate> rest(pool.begin() + static_cast<std::ptrdiff_t>(tested),
                              pool.end());
  std::sort(rest.begin(), rest.end(), [](const Candidate& a, const Candidate& b) {
    return a.length != b.length ? a.length < b.length : a.id < b.id;
  });
  const std::size_t base = batch.size();
  const auto fits = [&](std::size_t prefix) {
    batch.resize(base);
    batch.insert(batch.end(), rest.begin(),
                 rest.begin() + static_cast<std::ptrdiff_t>(prefix));
    return latency(batch) <= slo_s;
  };
  std::size_t lo = 0, hi = rest.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  batch.resize(base);
  batch.insert(batch.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(lo));
  return batch;
}

}  // namespace colosim
