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
#include <string_view>
#include <variant>
#include <vector>

#include "colosim/cluster/instance.h"
#include "colosim/cluster/request.h"
#include "colosim/perf_model/types.h"
#include "colosim/scheduler/types.h"

namespace colosim {

// Halt the offline Prefill running on a relaxed instance at its next
// layer boundary.
struct PreemptAction {
  int instance = 0;
};

struct EnqueueAction {
  std::uint32_t request = 0;
  int instance = 0;
  bool online_queue = true;
};

struct EvictAction {
  int instance = 0;
  std::vector<std::uint32_t> victims;
};

// Moves a request's KV. `reserve_tokens` (>= its context) is held on the
// destination from initiation; the surplus becomes a growth reservation.
struct MigrateAction {
  std::uint32_t request = 0;
  int from = 0;
  int to = 0;
  std::uint64_t reserve_tokens = 0;
};

// Keeps a freshly prefilled request decoding where it is.
struct KeepLocalAction {
  std::uint32_t request = 0;
};

// Sends a PullSignal from a strict instance to a relaxed one.
struct PullAction {
  int strict = 0;
  int relaxed = 0;
  LengthPreference pref;
};

using Action = std::variant<PreemptAction, EnqueueAction, EvictAction,
                            MigrateAction, KeepLocalAction, PullAction>;

struct Work {
  enum class Kind { kIdle, kPrefill, kDecode };
  Kind kind = Kind::kIdle;
  std::uint32_t request = 0;          // kPrefill
  std::vector<std::uint32_t> batch;   // kDecode
  std::vector<Action> prelude;        // applied before the work starts

  static Work idle() { return {}; }
  static Work prefill(std::uint32_t r) { return {Kind::kPrefill, r, {}, {}}; }
  static Work decode(std::vector<std::uint32_t> b) {
    return {Kind::kDecode, 0, std::move(b), {}};
  }
};

// Read-only state offered to policies.
class ClusterView {
 public:
  virtual ~ClusterView() = default;
  virtual double now() const = 0;
  virtual const ModelSpec& model() const = 0;
  virtual std::span<const Instance> instances() const = 0;
  virtual const Request& request(std::uint32_t index) const = 0;
  virtual std::size_t num_requests() const = 0;
  // Context each member would attend over in its next Decode step.
  virtual std::uint64_t decode_context(std::uint32_t index) const = 0;
  virtual double decode_latency(int instance,
                                std::span<const std::uint64_t> contexts) const = 0;
  virtual double prefill_latency(int instance, std::uint64_t tokens) const = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;

  virtual void reset(const ClusterView& view) = 0;
  virtual std::vector<Action> on_arrival(const ClusterView& view,
                                         std::uint32_t request) = 0;
  // Called for an idle instance; may return prelude actions.
  virtual Work next_work(const ClusterView& view, int instance) = 0;
  // Called when a Prefill finishes and again while the request waits in
  // AwaitingTransfer. Return MigrateAction, KeepLocalAction or nothing
  // (keep waiting), plus any evictions needed first.
  virtual std::vector<Action> dispatch(const ClusterView& view,
                                       std::uint32_t request) = 0;
  virtual std::vector<Action> after_decode_step(
      const ClusterView& view, int instance,
      std::span<const std::uint32_t> batch) = 0;
  virtual std::vector<Action> on_pull(const ClusterView& view, int relaxed,
                                      int strict, LengthPreference pref) = 0;
  // The chosen batch would outgrow the pool by `needed_tokens`; the policy
  // frees space and the engine asks for a new batch.
  virtual std::vector<Action> on_capacity_pressure(const ClusterView& view,
                                                   int instance,
                                                   std::uint64_t needed_tokens);
  virtual void on_preempted(std::uint32_t request, double now);
  virtual void on_evicted(std::uint32_t request, double now);
};

// Newest offline residents of `instance` (highest index first) until
// their KV covers needed_tokens.
std::vector<std::uint32_t> newest_offline_victims(const ClusterView& view,
                                                  int instance,
                                                  std::uint64_t needed_tokens);

}  // namespace colosim
