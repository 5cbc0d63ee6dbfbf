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
#include <limits>

#include "colosim/perf_model/roofline.h"
#include "colosim/scheduler/eviction.h"
#include "colosim/scheduler/migration.h"
#include "colosim/scheduler/policies.h"
#include "policy_util.h"

namespace colosim {

using namespace policy_util;

OocoPolicy::OocoPolicy(SchedulerConfig config, SLOConfig slo, std::uint64_t seed)
    : config_(std::move(config)),
      slo_(slo),
      seed_(seed),
      rng_(seed),
      risk_(config_.gating_window_s) {}

void OocoPolicy::reset(const ClusterView& view) {
  rng_.seed(seed_);
  risk_ = PreemptionRisk(config_.gating_window_s);
  bs_sat_.clear();
  for (const Instance& i : view.instances()) {
    bs_sat_.push_back(i.strict() ? compute_saturated_batch_size(view.model(), i.hw)
                                 : std::nullopt);
  }
  last_pull_.assign(view.instances().size(), -1.0);
}

void OocoPolicy::on_preempted(std::uint32_t, double now) { risk_.record(now); }
void OocoPolicy::on_evicted(std::uint32_t, double now) { risk_.record(now); }

std::vector<Action> OocoPolicy::on_arrival(const ClusterView& view,
                                           std::uint32_t request) {
  if (!view.request(request).online()) {
    return {EnqueueAction{request, smallest_offline_queue(view), false}};
  }
  const int target = shortest_online_queue(view);
  std::vector<Action> out;
  if (running_offline_prefill(view, instance(view, target))) {
    out.push_back(PreemptAction{target});
  }
  out.push_back(EnqueueAction{request, target, true});
  return out;
}

Work OocoPolicy::next_work(const ClusterView& view, int id) {
  const Instance& i = instance(view, id);
  return i.relaxed() ? relaxed_work(view, i) : strict_work(view, i);
}

Work OocoPolicy::relaxed_work(const ClusterView& view, const Instance& i) {
  if (!i.online_prefill_q.empty()) {
    const std::uint32_t front = i.online_prefill_q.front();
    const std::uint64_t need = view.request(front).prefill_tokens;
    if (need <= i.free_tokens()) return Work::prefill(front);
    const std::uint64_t shortfall = need - i.free_tokens();
    std::vector<std::uint32_t> victims = newest_offline_victims(view, i.id, shortfall);
    std::uint64_t freed = 0;
    for (std::uint32_t v : victims) {
      freed += view.request(v).kv_tokens + view.request(v).reserved_tokens;
    }
    if (freed >= shortfall) {
      Work w = Work::prefill(front);
      w.prelude.push_back(EvictAction{i.id, std::move(victims)});
      return w;
    }
    return i.decoding.empty() ? Work::idle() : Work::decode(i.decoding);
  }

  if (!i.offline_prefill_q.empty()) {
    const Request& cand = view.request(i.offline_prefill_q.front());
    if (cand.layers_done > 0) return Work::prefill(cand.index);
    const bool fits = cand.final_context() <= i.free_tokens();
    if (fits && i.decoding.empty()) return Work::prefill(cand.index);
    if (fits) {
      std::vector<std::uint64_t> ctx = contexts(view, i.decoding);
      GatingInputs g;
      g.pool_size = ctx.size();
      g.latency_b = view.decode_latency(i.id, ctx);
      ctx.push_back(cand.prefill_tokens + 1);
      g.latency_b_plus_1 = view.decode_latency(i.id, ctx);
      for (std::uint32_t m : i.decoding) {
        g.pool_remaining_tokens += static_cast<double>(view.request(m).remaining_tokens());
      }
      const double residence =
          static_cast<double>(cand.remaining_tokens()) * g.latency_b_plus_1;
      g.p_evict = risk_.p_evict(view.now(), residence);
      g.candidate_prefill_s = view.prefill_latency(i.id, cand.prefill_tokens);
      if (offline_gating(g)) return Work::prefill(cand.index);
    }
  }
  return i.decoding.empty() ? Work::idle() : Work::decode(i.decoding);
}

Work OocoPolicy::strict_work(const ClusterView& view, const Instance& i) {
  if (i.decoding.empty()) {
    Work w = Work::idle();
    w.prelude = maybe_pull(view, i);
    return w;
  }
  std::vector<Candidate> online, offline;
  for (std::uint32_t m : i.decoding) {
    (view.request(m).online() ? online : offline)
        .push_back({m, view.decode_context(m)});
  }
  const BatchPredictor predict = [&](std::span<const Candidate> b) {
    std::vector<std::uint64_t> ctx;
    ctx.reserve(b.size());
    for (const Candidate& c : b) ctx.push_back(c.length);
    return view.decode_latency(i.id, ctx);
  };
  const std::vector<Candidate> chosen =
      mix_decoding_selection(online, offline, slo_.tpot_slo, predict,
                             config_.k_random, rng_, config_.overload_mode);
  if (chosen.empty()) return Work::idle();
  std::vector<std::uint32_t> batch;
  for (const Candidate& c : chosen) batch.push_back(c.id);
  return Work::decode(std::move(batch));
}

std::vector<Action> OocoPolicy::maybe_pull(const ClusterView& view,
                                           const Instance& strict) {
  if (strict.inbound > 0 || last_pull_[static_cast<std::size_t>(strict.id)] == view.now()) {
    return {};
  }
  MigrationInputs in;
  for (std::uint32_t m : strict.decoding) {
    in.prev_batch.push_back({m, view.decode_context(m)});
  }
  in.all_residents_included = true;
  in.slo_s = slo_.tpot_slo;
  in.slo_margin = slo_.slo_margin;
  in.bs_sat = bs_sat_[static_cast<std::size_t>(strict.id)];
  in.kv_free_tokens = strict.free_tokens();
  const BatchPredictor predict = [&](std::span<const Candidate> b) {
    std::vector<std::uint64_t> ctx;
    ctx.reserve(b.size());
    for (const Candidate& c : b) ctx.push_back(c.length);
    return view.decode_latency(strict.id, ctx);
  };
  const LengthPreference pref = migration_decision(in, predict);
  if (pref.is_none()) return {};

  int source = -1;
  std::size_t best = 0;
  for (const Instance& r : view.instances()) {
    if (!r.relaxed()) continue;
    std::size_t pool = 0;
    for (std::uint32_t m : r.decoding) {
      if (!view.request(m).pending_migration) ++pool;
    }
    if (pool > best) {
      best = pool;
      source = r.id;
    }
  }
  if (source < 0) return {};
  last_pull_[static_cast<std::size_t>(strict.id)] = view.now();
  return {PullAction{strict.id, source, pref}};
}

std::vector<Action> OocoPolicy::after_decode_step(const ClusterView& view, int id,
                                                  std::span<const std::uint32_t> batch) {
  const Instance& i = instance(view, id);
  if (!i.strict()) return {};
  for (std::uint32_t m : i.decoding) {
    if (!std::binary_search(batch.begin(), batch.end(), m)) return {};
  }
  return maybe_pull(view, i);
}

std::vector<Action> OocoPolicy::on_pull(const ClusterView& view, int relaxed,
                                        int strict, LengthPreference pref) {
  const Instance& src = instance(view, relaxed);
  const Instance& dst = instance(view, strict);
  std::vector<Candidate> pool;
  for (std::uint32_t m : src.decoding) {
    const Request& r = view.request(m);
    if (r.pending_migration) continue;
    const std::uint64_t ctx = view.decode_context(m);
    if (pref.mode == LengthPreference::Mode::kMaxLenWithin && ctx > pref.limit) continue;
    pool.push_back({m, ctx});
  }
  if (pref.mode == LengthPreference::Mode::kMaxLenWithin) {
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return a.length != b.length ? a.length > b.length : a.id < b.id;
    });
  } else {
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return a.length != b.length ? a.length < b.length : a.id < b.id;
    });
  }

  std::vector<std::uint64_t> ctx = contexts(view, dst.decoding);
  const std::size_t base = ctx.size();
  const double budget = slo_.tpot_slo * (1.0 - slo_.slo_margin);
  const std::uint64_t free = dst.free_tokens();
  const auto fits = [&](std::size_t prefix) {
    ctx.resize(base);
    std::uint64_t reserve = 0;
    for (std::size_t k = 0; k < prefix; ++k) {
      ctx.push_back(pool[k].length);
      reserve += pool[k].length;
    }
    return reserve <= free && view.decode_latency(strict, ctx) <= budget;
  };
  std::size_t lo = 0, hi = pool.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  std::vector<Action> out;
  for (std::size_t k = 0; k < lo; ++k) {
    out.push_back(MigrateAction{pool[k].id, relaxed, strict, pool[k].length});
  }
  return out;
}

std::vector<Action> OocoPolicy::dispatch(const ClusterView& view,
                                         std::uint32_t request) {
  const Request& r = view.request(request);
  if (!r.online()) return {KeepLocalAction{request}};
  const std::uint64_t need = r.final_context();
  for (int id : strict_by_free(view)) {
    const Instance& s = instance(view, id);
    const std::uint64_t free = s.free_tokens();
    if (free >= need) return {MigrateAction{request, r.instance, id, need}};
    if (free + evictable_offline_tokens(view, s) < need) continue;

    std::vector<EvictionCandidate> pool;
    for (std::uint32_t m : s.decoding) {
      const Request& v = view.request(m);
      if (v.online()) continue;
      pool.push_back({m, v.kv_tokens + v.reserved_tokens,
                      std::uint64_t{v.record.prompt_len} + v.tokens_emitted});
    }
    const BottleneckKind kind = classify_bottleneck(
        view.model(), s.hw, BatchDescriptor::decode(contexts(view, s.decoding)),
        config_.capacity_threshold);
    std::vector<std::uint32_t> victims = select_eviction_victims(
        pool, (need - free) * s.bytes_per_token, kind, s.bytes_per_token);
    return {EvictAction{id, std::move(victims)},
            MigrateAction{request, r.instance, id, need}};
  }
  return {};
}

}  // namespace colosim
