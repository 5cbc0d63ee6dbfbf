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
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "colosim/cluster/policy.h"
#include "colosim/scheduler/gating.h"
#include "colosim/scheduler/mix_selection.h"
#include "colosim/scheduler/types.h"

namespace colosim {

struct SchedulerConfig {
  std::string policy = "ooco";  // ooco | base_pd | online_priority
  std::size_t k_random = 8;
  double gating_window_s = 300.0;
  OverloadMode overload_mode = OverloadMode::kBestEffort;
  double capacity_threshold = 1.0;
  // online_priority only. 0 derives the cap from the workload.
  std::uint64_t decode_cap = 0;
  double spike_window_s = 20.0;
  double spike_factor = 1.5;

  void validate() const;
  friend bool operator==(const SchedulerConfig&, const SchedulerConfig&) = default;
};

const std::vector<std::string>& policy_names();

std::unique_ptr<Policy> make_policy(const SchedulerConfig& config,
                                    const SLOConfig& slo, std::uint64_t seed);

class OocoPolicy final : public Policy {
 public:
  OocoPolicy(SchedulerConfig config, SLOConfig slo, std::uint64_t seed);

  std::string_view name() const override { return "ooco"; }
  void reset(const ClusterView& view) override;
  std::vector<Action> on_arrival(const ClusterView& view,
                                 std::uint32_t request) override;
  Work next_work(const ClusterView& view, int instance) override;
  std::vector<Action> dispatch(const ClusterView& view,
                               std::uint32_t request) override;
  std::vector<Action> after_decode_step(
      const ClusterView& view, int instance,
      std::span<const std::uint32_t> batch) override;
  std::vector<Action> on_pull(const ClusterView& view, int relaxed, int strict,
                              LengthPreference pref) override;
  void on_preempted(std::uint32_t request, double now) override;
  void on_evicted(std::uint32_t request, double now) override;

 private:
  Work relaxed_work(const ClusterView& view, const Instance& inst);
  Work strict_work(const ClusterView& view, const Instance& inst);
  std::vector<Action> maybe_pull(const ClusterView& view, const Instance& strict);

  SchedulerConfig config_;
  SLOConfig slo_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  PreemptionRisk risk_;
  std::vector<std::optional<std::uint64_t>> bs_sat_;
  std::vector<double> last_pull_;
};

class BasePdPolicy final : public Policy {
 public:
  std::string_view name() const override { return "base_pd"; }
  void reset(const ClusterView& view) override;
  std::vector<Action> on_arrival(const ClusterView& view,
                                 std::uint32_t request) override;
  Work next_work(const ClusterView& view, int instance) override;
  std::vector<Action> dispatch(const ClusterView& view,
                               std::uint32_t request) override;
  std::vector<Action> after_decode_step(
      const ClusterView& view, int instance,
      std::span<const std::uint32_t> batch) override;
  std::vector<Action> on_pull(const ClusterView& view, int relaxed, int strict,
                              LengthPreference pref) override;
};

class OnlinePriorityPolicy final : public Policy {
 public:
  OnlinePriorityPolicy(SchedulerConfig config, SLOConfig slo);

  std::string_view name() const override { return "online_priority"; }
  void reset(const ClusterView& view) override;
  std::vector<Action> on_arrival(const ClusterView& view,
                                 std::uint32_t request) override;
  Work next_work(const ClusterView& view, int instance) override;
  std::vector<Action> dispatch(const ClusterView& view,
                               std::uint32_t request) override;
  std::vector<Action> after_decode_step(
      const ClusterView& view, int instance,
      std::span<const std::uint32_t> batch) override;
  std::vector<Action> on_pull(const ClusterView& view, int relaxed, int strict,
                              LengthPreference pref) override;

  std::uint64_t decode_cap() const { return decode_cap_; }
  bool spiking(double now) const;

 private:
  SchedulerConfig config_;
  SLOConfig slo_;
  std::uint64_t decode_cap_ = 1;
  std::deque<double> recent_online_;
  std::uint64_t online_seen_ = 0;
};

}  // namespace colosim
