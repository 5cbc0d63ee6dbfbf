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

#include <algorithm>
#include <cmath>

#include "colosim/common/errors.h"
#include "colosim/scheduler/policies.h"
#include "policy_util.h"

namespace colosim {

using namespace policy_util;

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"ooco", "base_pd",
                                                 "online_priority"};
  return names;
}

void SchedulerConfig::validate() const {
  const auto& names = policy_names();
  if (std::find(names.begin(), names.end(), policy) == names.end()) {
    throw ConfigError("scheduler.policy: unknown policy '" + policy +
                      "' (expected ooco, base_pd or online_priority)");
  }
  if (!(gating_window_s > 0.0)) throw ConfigError("scheduler.gating_window_s must be > 0");
  if (!(spike_window_s > 0.0)) throw ConfigError("scheduler.spike_window_s must be > 0");
  if (!(spike_factor > 0.0)) throw ConfigError("scheduler.spike_factor must be > 0");
  if (!(capacity_threshold > 0.0 && capacity_threshold <= 1.0)) {
    throw ConfigError("perf_model.capacity_threshold must be in (0, 1]");
  }
}

std::unique_ptr<Policy> make_policy(const SchedulerConfig& config,
                                    const SLOConfig& slo, std::uint64_t seed) {
  config.validate();
  if (config.policy == "ooco") return std::make_unique<OocoPolicy>(config, slo, seed);
  if (config.policy == "base_pd") return std::make_unique<BasePdPolicy>();
  return std::make_unique<OnlinePriorityPolicy>(config, slo);
}

namespace {

std::vector<Action> migrate_to_strict(const ClusterView& view, const Request& r,
                                      std::uint64_t reserve) {
  for (int id : strict_by_free(view)) {
    if (instance(view, id).free_tokens() >= std::max(reserve, r.final_context())) {
      return {MigrateAction{r.index, r.instance, id, reserve}};
    }
  }
  return {};
}

}  // namespace

// base_pd

void BasePdPolicy::reset(const ClusterView&) {}

std::vector<Action> BasePdPolicy::on_arrival(const ClusterView& view,
                                             std::uint32_t request) {
  return {EnqueueAction{request, shortest_online_queue(view), true}};
}

Work BasePdPolicy::next_work(const ClusterView& view, int id) {
  const Instance& i = instance(view, id);
  if (i.strict()) return i.decoding.empty() ? Work::idle() : Work::decode(i.decoding);
  if (i.online_prefill_q.empty()) return Work::idle();
  const std::uint32_t front = i.online_prefill_q.front();
  if (view.request(front).prefill_tokens > i.free_tokens()) return Work::idle();
  return Work::prefill(front);
}

std::vector<Action> BasePdPolicy::dispatch(const ClusterView& view,
                                           std::uint32_t request) {
  const Request& r = view.request(request);
  return migrate_to_strict(view, r, r.final_context());
}

std::vector<Action> BasePdPolicy::after_decode_step(const ClusterView&, int,
                                                    std::span<const std::uint32_t>) {
  return {};
}

std::vector<Action> BasePdPolicy::on_pull(const ClusterView&, int, int,
                                          LengthPreference) {
  return {};
}

// online_priority

OnlinePriorityPolicy::OnlinePriorityPolicy(SchedulerConfig config, SLOConfig slo)
    : config_(std::move(config)), slo_(slo) {}

void OnlinePriorityPolicy::reset(const ClusterView& view) {
  recent_online_.clear();
  online_seen_ = 0;
  if (config_.decode_cap > 0) {
    decode_cap_ = config_.decode_cap;
    return;
  }
  std::vector<double> ctx;
  ctx.reserve(view.num_requests());
  for (std::uint32_t k = 0; k < view.num_requests(); ++k) {
    const TraceRecord& rec = view.request(k).record;
    ctx.push_back(rec.prompt_len + rec.output_len / 2.0);
  }
  decode_cap_ = 1;
  if (ctx.empty()) return;
  std::sort(ctx.begin(), ctx.end());
  const std::size_t n = ctx.size();
  const double median = n % 2 ? ctx[n / 2] : 0.5 * (ctx[n / 2 - 1] + ctx[n / 2]);
  const std::uint64_t typical = std::max<std::uint64_t>(1, std::llround(median));
  int strict = -1;
  for (const Instance& i : view.instances()) {
    if (i.strict()) {
      strict = i.id;
      break;
    }
  }
  const auto fits = [&](std::uint64_t b) {
    const std::vector<std::uint64_t> batch(b, typical);
    return view.decode_latency(strict, batch) <= slo_.tpot_slo;
  };
  const std::uint64_t limit = std::max<std::uint64_t>(
      1, instance(view, strict).capacity_tokens() / typical);
  if (!fits(1)) return;
  std::uint64_t lo = 1, hi = limit;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  decode_cap_ = lo;
}

bool OnlinePriorityPolicy::spiking(double now) const {
  const double window = config_.spike_window_s;
  if (now < window || online_seen_ == 0 || now <= 0.0) return false;
  const auto first = std::lower_bound(recent_online_.begin(), recent_online_.end(),
                                      now - window);
  const double recent =
      static_cast<double>(recent_online_.end() - first) / window;
  const double long_run = static_cast<double>(online_seen_) / now;
  return recent > config_.spike_factor * long_run;
}

std::vector<Action> OnlinePriorityPolicy::on_arrival(const ClusterView& view,
                                                     std::uint32_t request) {
  if (!view.request(request).online()) {
    return {EnqueueAction{request, smallest_offline_queue(view), false}};
  }
  const double now = view.now();
  ++online_seen_;
  recent_online_.push_back(now);
  while (!recent_online_.empty() &&
         recent_online_.front() < now - config_.spike_window_s) {
    recent_online_.pop_front();
  }
  return {EnqueueAction{request, shortest_online_queue(view), true}};
}

Work OnlinePriorityPolicy::next_work(const ClusterView& view, int id) {
  const Instance& i = instance(view, id);
  const bool spike = spiking(view.now());
  if (i.relaxed()) {
    if (!i.online_prefill_q.empty()) {
      const std::uint32_t front = i.online_prefill_q.front();
      if (view.request(front).prefill_tokens > i.free_tokens()) return Work::idle();
      return Work::prefill(front);
    }
    if (i.offline_prefill_q.empty() || spike) return Work::idle();
    std::size_t strict_count = 0;
    for (const Instance& s : view.instances()) strict_count += s.strict() ? 1 : 0;
    if (strict_residents(view) >= decode_cap_ * strict_count) return Work::idle();
    const std::uint32_t front = i.offline_prefill_q.front();
    if (view.request(front).prefill_tokens > i.free_tokens()) return Work::idle();
    return Work::prefill(front);
  }

  std::vector<std::uint32_t> batch;
  std::size_t online = 0;
  for (std::uint32_t m : i.decoding) {
    if (view.request(m).online()) {
      batch.push_back(m);
      ++online;
    }
  }
  if (!spike) {
    for (std::uint32_t m : i.decoding) {
      if (batch.size() >= std::max<std::uint64_t>(decode_cap_, online)) break;
      if (!view.request(m).online()) batch.push_back(m);
    }
  }
  if (batch.empty()) return Work::idle();
  return Work::decode(std::move(batch));
}

std::vector<Action> OnlinePriorityPolicy::dispatch(const ClusterView& view,
                                                   std::uint32_t request) {
  const Request& r = view.request(request);
  if (!r.online()) return migrate_to_strict(view, r, r.kv_tokens);
  const std::uint64_t need = r.final_context();
  for (int id : strict_by_free(view)) {
    const Instance& s = instance(view, id);
    const std::uint64_t free = s.free_tokens();
    if (free >= need) return {MigrateAction{request, r.instance, id, need}};
    if (free + evictable_offline_tokens(view, s) < need) continue;
    return {EvictAction{id, newest_offline_victims(view, id, need - free)},
            MigrateAction{request, r.instance, id, need}};
  }
  return {};
}

std::vector<Action> OnlinePriorityPolicy::after_decode_step(
    const ClusterView&, int, std::span<const std::uint32_t>) {
  return {};
}

std::vector<Action> OnlinePriorityPolicy::on_pull(const ClusterView&, int, int,
                                                  LengthPreference) {
  return {};
}

}  // namespace colosim
