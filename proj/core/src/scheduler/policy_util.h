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

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "colosim/cluster/policy.h"

namespace colosim::policy_util {

inline const Instance& instance(const ClusterView& view, int id) {
  return view.instances()[static_cast<std::size_t>(id)];
}

inline bool running_online_prefill(const ClusterView& view, const Instance& i) {
  return i.activity == Activity::kPrefill && !i.halting &&
         view.request(i.prefill_request).online();
}

inline bool running_offline_prefill(const ClusterView& view, const Instance& i) {
  return i.activity == Activity::kPrefill && !i.halting &&
         !view.request(i.prefill_request).online();
}

inline int shortest_online_queue(const ClusterView& view) {
  int best = -1;
  std::size_t best_len = 0;
  for (const Instance& i : view.instances()) {
    if (!i.relaxed()) continue;
    const std::size_t len =
        i.online_prefill_q.size() + (running_online_prefill(view, i) ? 1 : 0);
    if (best < 0 || len < best_len) {
      best = i.id;
      best_len = len;
    }
  }
  return best;
}

inline int smallest_offline_queue(const ClusterView& view) {
  int best = -1;
  for (const Instance& i : view.instances()) {
    if (!i.relaxed()) continue;
    if (best < 0 ||
        i.offline_prefill_q.size() < instance(view, best).offline_prefill_q.size()) {
      best = i.id;
    }
  }
  return best;
}

// Strict instances, most free KV first.
inline std::vector<int> strict_by_free(const ClusterView& view) {
  std::vector<int> out;
  for (const Instance& i : view.instances()) {
    if (i.strict()) out.push_back(i.id);
  }
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
    return instance(view, a).free_tokens() > instance(view, b).free_tokens();
  });
  return out;
}

inline std::vector<std::uint64_t> contexts(const ClusterView& view,
                                           std::span<const std::uint32_t> ids) {
  std::vector<std::uint64_t> out;
  out.reserve(ids.size());
  for (std::uint32_t id : ids) out.push_back(view.decode_context(id));
  return out;
}

inline std::uint64_t evictable_offline_tokens(const ClusterView& view,
                                              const Instance& i) {
  std::uint64_t total = 0;
  for (std::uint32_t id : i.decoding) {
    const Request& r = view.request(id);
    if (!r.online()) total += r.kv_tokens + r.reserved_tokens;
  }
  return total;
}

inline std::size_t strict_residents(const ClusterView& view) {
  std::size_t n = 0;
  for (const Instance& i : view.instances()) {
    if (i.strict()) n += i.decoding.size() + i.inbound;
  }
  return n;
}

}  // namespace colosim::policy_util
