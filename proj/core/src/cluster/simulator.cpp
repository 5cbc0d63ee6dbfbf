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

#include "colosim/cluster/simulator.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "colosim/common/errors.h"
#include "colosim/perf_model/roofline.h"

namespace colosim {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void policy_error(const std::string& what) {
  throw std::logic_error("scheduling error: " + what);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kTransferDone: return "transfer_done";
    case EventKind::kDecodeStepDone: return "decode_step_done";
    case EventKind::kPrefillLayerDone: return "prefill_layer_done";
    case EventKind::kPrefillDone: return "prefill_done";
    case EventKind::kArrival: return "arrival";
    case EventKind::kPullSignal: return "pull_signal";
    case EventKind::kSweepTick: return "sweep_tick";
  }
  return "?";
}

void ClusterConfig::validate() const {
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("perf_model.model: ") + e.what());
  }
  if (instances.empty()) throw ConfigError("cluster: no instances configured");
  bool relaxed = false, strict = false;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const InstanceSpec& spec = instances[i];
    try {
      spec.hw.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("cluster: instance " + std::to_string(i) + ": " + e.what());
    }
    if (kv_cache_bytes(model, 1) > spec.hw.kv_capacity_bytes) {
      throw ConfigError("cluster: instance " + std::to_string(i) +
                        ": kv_capacity_bytes below one token");
    }
    (spec.kind == InstanceKind::kLatencyRelaxed ? relaxed : strict) = true;
  }
  if (!relaxed || !strict) {
    throw ConfigError(
        "cluster: need at least one relaxed and one strict instance");
  }
  if (!(transfer_bw >= 0.0)) throw ConfigError("cluster.transfer_bw must be >= 0");
  if (!(drain_s >= 0.0)) throw ConfigError("cluster.drain_s must be >= 0");
  if (!(utilization_interval_s > 0.0)) {
    throw ConfigError("cluster.utilization_interval_s must be > 0");
  }
}

Simulator::Simulator(ClusterConfig config, Policy& policy, SimOptions options)
    : config_(std::move(config)), policy_(policy), options_(options) {
  config_.validate();
  const std::uint64_t per_token = kv_cache_bytes(config_.model, 1);
  for (std::size_t i = 0; i < config_.instances.size(); ++i) {
    Instance inst;
    inst.id = static_cast<int>(i);
    inst.kind = config_.instances[i].kind;
    inst.hw = config_.instances[i].hw;
    inst.bytes_per_token = per_token;
    instances_.push_back(std::move(inst));
  }
}

void Simulator::load(const Trace& online, const Trace& offline) {
  requests_.clear();
  requests_.reserve(online.size() + offline.size());
  std::size_t a = 0, b = 0;
  while (a < online.size() || b < offline.size()) {
    const bool take_online =
        b == offline.size() ||
        (a < online.size() &&
         online.records[a].arrival_ts <= offline.records[b].arrival_ts);
    Request r;
    r.record = take_online ? online.records[a++] : offline.records[b++];
    r.index = static_cast<std::uint32_t>(requests_.size());
    r.prefill_tokens = r.record.prompt_len;
    requests_.push_back(std::move(r));
  }

  std::uint64_t relaxed_cap = 0, strict_cap = 0;
  for (const Instance& inst : instances_) {
    (inst.relaxed() ? relaxed_cap : strict_cap) =
        std::max(inst.relaxed() ? relaxed_cap : strict_cap, inst.capacity_tokens());
  }
  for (const Request& r : requests_) {
    if (r.final_context() > std::min(relaxed_cap, strict_cap)) {
      throw InfeasibleScenario(
          "request " + r.record.id + " needs " +
          std::to_string(kv_cache_bytes(config_.model, r.final_context())) +
          " KV bytes, more than an instance can hold");
    }
  }

  queue_ = {};
  awaiting_.clear();
  seq_ = 0;
  now_ = 0.0;
  next_arrival_ = 0;
  counts_ = {};
  utilization_.clear();
  last_tick_ = 0.0;
  max_preemption_delay_ = 0.0;
  horizon_ = requests_.empty()
                 ? 0.0
                 : requests_.back().record.arrival_ts + config_.drain_s;
  monitor_.reset(requests_.size());
  policy_.reset(*this);

  if (!requests_.empty()) {
    Event e;
    e.time = requests_[0].record.arrival_ts;
    e.kind = EventKind::kArrival;
    e.request = 0;
    push(e);
    next_arrival_ = 1;
    if (config_.utilization_interval_s <= horizon_) {
      Event tick;
      tick.time = config_.utilization_interval_s;
      tick.kind = EventKind::kSweepTick;
      push(tick);
    }
  }
}

void Simulator::push(Event e) {
  e.seq = seq_++;
  queue_.push(e);
}

bool Simulator::step() {
  if (queue_.empty()) return false;
  const Event e = queue_.top();
  if (e.time > horizon_) return false;
  queue_.pop();
  now_ = e.time;
  handle(e);
  schedule_idle_work();
  if (options_.check_invariants) monitor_.check_capacity(now_, instances_);
  return true;
}

MetricsLog Simulator::run(const Trace& online, const Trace& offline) {
  load(online, offline);
  while (step()) {
  }
  return finish();
}

MetricsLog Simulator::finish() {
  MetricsLog log;
  log.requests.reserve(requests_.size());
  for (const Request& r : requests_) {
    RequestRecord rec;
    rec.id = r.record.id;
    rec.cls = r.record.cls;
    rec.arrival = r.record.arrival_ts;
    rec.prompt_len = r.record.prompt_len;
    rec.output_len = r.record.output_len;
    rec.first_token_ts = r.first_token_ts;
    rec.completion_ts = r.completion_ts;
    rec.last_token_ts = r.last_token_ts;
    rec.max_token_gap = r.max_token_gap;
    rec.tokens_emitted = r.tokens_emitted;
    rec.emit_ts = r.emit_ts;
    rec.evictions = r.evictions;
    rec.migrations = r.migrations;
    rec.preemptions = r.preemptions;
    log.requests.push_back(std::move(rec));
  }
  log.utilization = utilization_;
  log.counts = counts_;
  log.horizon_s = horizon_;
  log.max_preemption_delay_s = max_preemption_delay_;
  log.invariant_violations = monitor_.messages();
  if (monitor_.violation_count() > monitor_.messages().size()) {
    log.invariant_violations.push_back(
        std::to_string(monitor_.violation_count() - monitor_.messages().size()) +
        " further violations");
  }
  return log;
}

std::uint64_t Simulator::decode_context(std::uint32_t index) const {
  return requests_.at(index).kv_tokens + 1;
}

double Simulator::decode_latency(int instance,
                                 std::span<const std::uint64_t> contexts) const {
  if (contexts.empty()) return 0.0;
  return estimate_decode_latency(config_.model,
                                 instances_.at(static_cast<std::size_t>(instance)).hw,
                                 contexts.data(), contexts.size());
}

double Simulator::prefill_latency(int instance, std::uint64_t tokens) const {
  return estimate_iteration(config_.model,
                            instances_.at(static_cast<std::size_t>(instance)).hw,
                            BatchDescriptor::prefill({tokens}))
      .total();
}

void Simulator::handle(const Event& e) {
  switch (e.kind) {
    case EventKind::kPrefillLayerDone:
    case EventKind::kPrefillDone:
    case EventKind::kDecodeStepDone:
      if (inst(e.instance).generation != e.generation) return;
      break;
    default:
      break;
  }
  ++counts_.events;
  log_event(e);
  switch (e.kind) {
    case EventKind::kArrival: on_arrival(e); break;
    case EventKind::kPrefillLayerDone: on_prefill_halt(e); break;
    case EventKind::kPrefillDone: on_prefill_done(e); break;
    case EventKind::kDecodeStepDone: on_decode_step_done(e); break;
    case EventKind::kTransferDone: on_transfer_done(e); break;
    case EventKind::kPullSignal: on_pull_signal(e); break;
    case EventKind::kSweepTick: on_tick(e); break;
  }
}

void Simulator::log_event(const Event& e) {
  if (options_.event_log == nullptr) return;
  std::string line = "{\"t\":" + fmt(e.time) + ",\"kind\":\"" +
                     std::string(to_string(e.kind)) + "\"";
  if (e.instance >= 0) line += ",\"instance\":" + std::to_string(e.instance);
  switch (e.kind) {
    case EventKind::kArrival:
    case EventKind::kTransferDone:
      line += ",\"request\":\"" + requests_[e.request].record.id + "\"";
      break;
    case EventKind::kPrefillLayerDone:
    case EventKind::kPrefillDone:
      line += ",\"request\":\"" +
              requests_[inst(e.instance).prefill_request].record.id + "\"";
      break;
    case EventKind::kDecodeStepDone:
      line += ",\"batch\":" + std::to_string(inst(e.instance).batch.size());
      break;
    case EventKind::kPullSignal:
      line += ",\"from\":" + std::to_string(e.source) + ",\"pref\":\"" +
              std::string(to_string(e.pref.mode)) + "\",\"limit\":" +
              std::to_string(e.pref.limit);
      break;
    case EventKind::kSweepTick:
      break;
  }
  line += "}\n";
  *options_.event_log << line;
}

void Simulator::on_arrival(const Event& e) {
  if (next_arrival_ < requests_.size()) {
    Event next;
    next.time = requests_[next_arrival_].record.arrival_ts;
    next.kind = EventKind::kArrival;
    next.request = static_cast<std::uint32_t>(next_arrival_);
    push(next);
    ++next_arrival_;
  }
  apply(policy_.on_arrival(*this, e.request));
  if (requests_[e.request].instance < 0) {
    policy_error("arrival of " + requests_[e.request].record.id + " not enqueued");
  }
}

void Simulator::apply(const std::vector<Action>& actions) {
  for (const Action& a : actions) apply(a);
}

void Simulator::apply(const Action& action) {
  std::visit(
      Overloaded{
          [&](const PreemptAction& a) { preempt_prefill(a.instance); },
          [&](const EnqueueAction& a) { enqueue(a.request, a.instance, a.online_queue); },
          [&](const EvictAction& a) { evict(a.instance, a.victims); },
          [&](const MigrateAction& a) {
            if (requests_.at(a.request).instance != a.from) {
              policy_error("migration source mismatch for " +
                           requests_[a.request].record.id);
            }
            migrate_kv(a.request, a.from, a.to, a.reserve_tokens);
          },
          [&](const KeepLocalAction& a) {
            Request& r = requests_.at(a.request);
            if (r.state != RequestState::kAwaitingTransfer) {
              policy_error("keep-local of " + r.record.id + " in state " +
                           std::string(to_string(r.state)));
            }
            if (r.online() && inst(r.instance).relaxed()) {
              policy_error("online request " + r.record.id +
                           " kept on a relaxed instance");
            }
            awaiting_.erase(std::lower_bound(awaiting_.begin(), awaiting_.end(),
                                             r.index));
            land(r.index, r.instance);
          },
          [&](const PullAction& a) {
            Event e;
            e.time = now_;
            e.kind = EventKind::kPullSignal;
            e.instance = a.relaxed;
            e.source = a.strict;
            e.pref = a.pref;
            push(e);
          },
      },
      action);
}

void Simulator::enqueue(std::uint32_t request, int instance, bool online_queue) {
  Request& r = requests_.at(request);
  Instance& target = inst(instance);
  if (!target.relaxed()) {
    policy_error("prefill queue on strict instance " + std::to_string(instance));
  }
  if (r.state != RequestState::kQueued || r.instance >= 0) {
    policy_error("enqueue of " + r.record.id + " twice");
  }
  r.instance = instance;
  (online_queue ? target.online_prefill_q : target.offline_prefill_q).push_back(request);
}

void Simulator::set_busy(Instance& i, bool busy) {
  if (busy) {
    i.busy_since = now_;
  } else {
    i.busy_s += now_ - i.busy_since;
  }
}

void Simulator::start_prefill(int instance, std::uint32_t request) {
  Instance& i = inst(instance);
  Request& r = requests_.at(request);
  if (!i.idle() || i.halting) policy_error("prefill on busy instance");
  if (r.instance != instance) {
    policy_error("prefill of " + r.record.id + " queued elsewhere");
  }
  for (auto* q : {&i.online_prefill_q, &i.offline_prefill_q}) {
    const auto it = std::find(q->begin(), q->end(), request);
    if (it != q->end()) {
      q->erase(it);
      break;
    }
  }
  if (r.kv_tokens == 0) {
    if (i.free_tokens() < r.prefill_tokens) {
      policy_error("prefill of " + r.record.id + " without KV room");
    }
    r.kv_tokens = r.prefill_tokens;
    i.kv_used_tokens += r.kv_tokens;
  }
  r.transition(RequestState::kPrefilling);
  const double total = prefill_latency(instance, r.prefill_tokens);
  const std::uint32_t layers = static_cast<std::uint32_t>(config_.model.num_layers);
  i.activity = Activity::kPrefill;
  i.prefill_request = request;
  i.layer_latency = total / layers;
  i.run_start = now_;
  i.run_start_layer = r.layers_done;
  i.run_end = now_ + i.layer_latency * (layers - r.layers_done);
  i.halting = false;
  set_busy(i, true);
  if (options_.check_invariants) monitor_.on_prefill_start(now_, i, r);

  Event e;
  e.time = i.run_end;
  e.kind = EventKind::kPrefillDone;
  e.instance = instance;
  e.generation = i.generation;
  push(e);
}

double Simulator::preempt_prefill(int instance) {
  Instance& i = inst(instance);
  if (!i.relaxed() || i.activity != Activity::kPrefill ||
      requests_[i.prefill_request].online()) {
    policy_error("preempt on instance " + std::to_string(instance) +
                 " without a running offline prefill");
  }
  if (i.halting) return i.halt_time - now_;
  Request& r = requests_[i.prefill_request];
  const std::uint32_t layers = static_cast<std::uint32_t>(config_.model.num_layers);
  const double elapsed = now_ - i.run_start;
  const double whole = std::floor(elapsed / i.layer_latency);
  const double frac = elapsed - whole * i.layer_latency;
  std::uint32_t halt = i.run_start_layer + static_cast<std::uint32_t>(whole);
  double delay = 0.0;
  if (frac > 1e-12 * i.layer_latency) {
    ++halt;
    delay = std::max(0.0, i.run_start + (whole + 1.0) * i.layer_latency - now_);
  }
  ++counts_.preemptions;
  ++r.preemptions;
  policy_.on_preempted(r.index, now_);
  if (halt >= layers) {
    // The next boundary is the end of the Prefill itself.
    delay = std::max(0.0, i.run_end - now_);
    max_preemption_delay_ = std::max(max_preemption_delay_, delay);
    if (options_.check_invariants) monitor_.on_preemption(now_, delay, i.layer_latency);
    return delay;
  }
  max_preemption_delay_ = std::max(max_preemption_delay_, delay);
  if (options_.check_invariants) monitor_.on_preemption(now_, delay, i.layer_latency);
  i.halting = true;
  i.halt_layer = halt;
  i.halt_time = now_ + delay;
  ++i.generation;
  Event e;
  e.time = i.halt_time;
  e.kind = EventKind::kPrefillLayerDone;
  e.instance = instance;
  e.generation = i.generation;
  push(e);
  return delay;
}

void Simulator::on_prefill_halt(const Event& e) {
  Instance& i = inst(e.instance);
  Request& r = requests_[i.prefill_request];
  r.layers_done = i.halt_layer;
  r.transition(RequestState::kQueued);
  i.offline_prefill_q.push_front(r.index);
  i.activity = Activity::kIdle;
  i.halting = false;
  ++i.generation;
  set_busy(i, false);
}

void Simulator::on_prefill_done(const Event& e) {
  Instance& i = inst(e.instance);
  Request& r = requests_[i.prefill_request];
  i.activity = Activity::kIdle;
  i.halting = false;
  ++i.generation;
  set_busy(i, false);

  r.layers_done = 0;
  ++counts_.prefills;
  counts_.prefill_tokens += r.prefill_tokens;
  if (r.tokens_emitted > 0 || r.evictions > 0) {
    counts_.recompute_tokens += r.prefill_tokens;
  }
  if (options_.check_invariants) monitor_.on_prefill_done(r);

  if (r.tokens_emitted + 1 == r.record.output_len) {
    emit_token(r);
    complete(r);
    return;
  }
  r.token_pending = true;
  r.transition(RequestState::kAwaitingTransfer);
  awaiting_.insert(std::lower_bound(awaiting_.begin(), awaiting_.end(), r.index),
                   r.index);
  apply(policy_.dispatch(*this, r.index));
}

void Simulator::emit_token(Request& r) {
  ++r.tokens_emitted;
  if (r.first_token_ts < 0.0) r.first_token_ts = now_;
  if (r.last_token_ts >= 0.0) {
    r.max_token_gap = std::max(r.max_token_gap, now_ - r.last_token_ts);
  }
  r.last_token_ts = now_;
  if (options_.keep_emit_timestamps) r.emit_ts.push_back(now_);
}

void Simulator::release_kv(Request& r, Instance& i) {
  i.kv_used_tokens -= r.kv_tokens;
  i.kv_reserved_tokens -= r.reserved_tokens;
  r.kv_tokens = 0;
  r.reserved_tokens = 0;
}

void Simulator::complete(Request& r) {
  Instance& i = inst(r.instance);
  if (r.state == RequestState::kDecoding) i.remove_decoding(r.index);
  if (r.pending_migration) {
    inst(r.destination).kv_reserved_tokens -= r.transfer_reserve;
    --inst(r.destination).inbound;
    r.pending_migration = false;
    r.destination = -1;
    r.transfer_reserve = 0;
  }
  r.transition(RequestState::kComplete);
  release_kv(r, i);
  r.completion_ts = now_;
  if (options_.check_invariants) monitor_.on_complete(now_, r);
}

void Simulator::land(std::uint32_t request, int instance) {
  Request& r = requests_[request];
  r.transition(RequestState::kDecoding);
  r.instance = instance;
  inst(instance).add_decoding(request);
  if (r.token_pending) {
    r.token_pending = false;
    emit_token(r);
  }
}

std::optional<double> Simulator::migrate_kv(std::uint32_t request, int from,
                                            int to, std::uint64_t reserve_tokens) {
  Request& r = requests_.at(request);
  if (from == to) policy_error("migration onto the same instance");
  if (r.instance != from || (r.state != RequestState::kDecoding &&
                             r.state != RequestState::kAwaitingTransfer)) {
    policy_error("migration of " + r.record.id + " in state " +
                 std::string(to_string(r.state)));
  }
  if (r.pending_migration) return std::nullopt;
  if (r.online() && !inst(to).strict()) {
    policy_error("online request " + r.record.id + " sent to relaxed instance");
  }
  Instance& src = inst(from);
  const bool in_step = r.state == RequestState::kDecoding &&
                       src.activity == Activity::kDecode &&
                       std::binary_search(src.batch.begin(), src.batch.end(), request);
  const std::uint64_t context = r.kv_tokens + (in_step ? 1 : 0);
  if (reserve_tokens < context) {
    policy_error("migration reserve below the context of " + r.record.id);
  }
  if (inst(to).free_tokens() < reserve_tokens) return std::nullopt;

  const double bw = config_.transfer_bw > 0.0 ? config_.transfer_bw : src.hw.comm_bw;
  if (r.state == RequestState::kDecoding) {
    ++counts_.migrations;
    ++r.migrations;
  }
  inst(to).kv_reserved_tokens += reserve_tokens;
  ++inst(to).inbound;
  r.transfer_reserve = reserve_tokens;
  r.destination = to;
  if (in_step) {
    r.pending_migration = true;
    return src.run_end + comm_latency(kv_cache_bytes(config_.model, context), bw);
  }
  start_transfer(request, to);
  return now_ + comm_latency(kv_cache_bytes(config_.model, context), bw);
}

void Simulator::start_transfer(std::uint32_t request, int to) {
  Request& r = requests_[request];
  Instance& src = inst(r.instance);
  if (r.state == RequestState::kDecoding) {
    src.remove_decoding(request);
  } else {
    awaiting_.erase(std::lower_bound(awaiting_.begin(), awaiting_.end(), request));
  }
  src.kv_reserved_tokens -= r.reserved_tokens;
  r.reserved_tokens = 0;
  r.transition(RequestState::kTransferring);
  r.destination = to;
  ++counts_.transfers;
  const double bw = config_.transfer_bw > 0.0 ? config_.transfer_bw : src.hw.comm_bw;
  Event e;
  e.time = now_ + comm_latency(kv_cache_bytes(config_.model, r.kv_tokens), bw);
  e.kind = EventKind::kTransferDone;
  e.instance = to;
  e.request = request;
  push(e);
}

void Simulator::on_transfer_done(const Event& e) {
  Request& r = requests_[e.request];
  Instance& src = inst(r.instance);
  Instance& dst = inst(r.destination);
  src.kv_used_tokens -= r.kv_tokens;
  dst.kv_reserved_tokens -= r.transfer_reserve;
  dst.kv_used_tokens += r.kv_tokens;
  r.reserved_tokens = r.transfer_reserve - r.kv_tokens;
  dst.kv_reserved_tokens += r.reserved_tokens;
  r.transfer_reserve = 0;
  --dst.inbound;
  const int to = r.destination;
  r.destination = -1;
  land(r.index, to);
}

std::uint64_t Simulator::evict(int instance, std::span<const std::uint32_t> victims) {
  Instance& i = inst(instance);
  std::uint64_t freed = 0;
  for (std::uint32_t v : victims) {
    Request& r = requests_.at(v);
    if (r.online()) {
      throw std::logic_error("attempt to evict online request " + r.record.id);
    }
    if (r.state != RequestState::kDecoding || r.instance != instance) {
      policy_error("eviction of non-resident request " + r.record.id);
    }
    if (r.pending_migration) {
      inst(r.destination).kv_reserved_tokens -= r.transfer_reserve;
      --inst(r.destination).inbound;
      r.pending_migration = false;
      r.destination = -1;
      r.transfer_reserve = 0;
    }
    freed += kv_cache_bytes(config_.model, r.kv_tokens);
    release_kv(r, i);
    i.remove_decoding(v);
    r.transition(RequestState::kEvicted);
    ++r.evictions;
    ++counts_.evictions;
    if (options_.check_invariants) monitor_.on_eviction(r);
    r.prefill_tokens = std::uint64_t{r.record.prompt_len} + r.tokens_emitted;
    r.layers_done = 0;

    int target = -1;
    for (const Instance& cand : instances_) {
      if (!cand.relaxed()) continue;
      if (target < 0 || cand.offline_prefill_q.size() <
                            inst(target).offline_prefill_q.size()) {
        target = cand.id;
      }
    }
    r.instance = target;
    inst(target).offline_prefill_q.push_back(v);
    policy_.on_evicted(v, now_);
  }
  return freed;
}

double Simulator::step_decode(int instance, std::vector<std::uint32_t> batch) {
  Instance& i = inst(instance);
  if (!i.idle() || batch.empty()) policy_error("decode step on busy instance or empty batch");
  std::sort(batch.begin(), batch.end());
  batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
  std::uint64_t growth = 0;
  std::vector<std::uint64_t> contexts;
  contexts.reserve(batch.size());
  for (std::uint32_t m : batch) {
    const Request& r = requests_.at(m);
    if (r.state != RequestState::kDecoding || r.instance != instance) {
      policy_error("batch member " + r.record.id + " is not resident");
    }
    if (r.online() && i.relaxed()) {
      policy_error("online decode of " + r.record.id + " on relaxed instance");
    }
    if (r.reserved_tokens == 0) ++growth;
    contexts.push_back(r.kv_tokens + 1);
  }
  if (growth > i.free_tokens()) policy_error("decode batch outgrows the KV pool");
  if (options_.check_invariants) monitor_.on_decode_start(now_, i, batch, requests_);
  const double latency = decode_latency(instance, contexts);
  i.step_growth = growth;
  i.kv_reserved_tokens += growth;
  i.activity = Activity::kDecode;
  i.batch = std::move(batch);
  i.run_start = now_;
  i.run_end = now_ + latency;
  set_busy(i, true);
  ++counts_.decode_steps;

  Event e;
  e.time = i.run_end;
  e.kind = EventKind::kDecodeStepDone;
  e.instance = instance;
  e.generation = i.generation;
  push(e);
  return latency;
}

void Simulator::on_decode_step_done(const Event& e) {
  Instance& i = inst(e.instance);
  const std::vector<std::uint32_t> batch = std::move(i.batch);
  i.batch.clear();
  i.activity = Activity::kIdle;
  ++i.generation;
  i.kv_reserved_tokens -= i.step_growth;
  i.step_growth = 0;
  set_busy(i, false);

  for (std::uint32_t m : batch) {
    Request& r = requests_[m];
    if (r.state != RequestState::kDecoding || r.instance != e.instance) continue;
    if (r.reserved_tokens > 0) {
      --r.reserved_tokens;
      --i.kv_reserved_tokens;
    }
    ++i.kv_used_tokens;
    ++r.kv_tokens;
    emit_token(r);
    if (r.tokens_emitted == r.record.output_len) complete(r);
  }
  for (std::uint32_t m : batch) {
    Request& r = requests_[m];
    if (r.state != RequestState::kDecoding || !r.pending_migration) continue;
    r.pending_migration = false;
    start_transfer(m, r.destination);
  }
  apply(policy_.after_decode_step(*this, e.instance, batch));
}

void Simulator::on_pull_signal(const Event& e) {
  ++counts_.pull_signals;
  apply(policy_.on_pull(*this, e.instance, e.source, e.pref));
}

void Simulator::on_tick(const Event& e) {
  const double span = e.time - last_tick_;
  for (Instance& i : instances_) {
    double busy = i.busy_s;
    if (!i.idle()) {
      busy += now_ - i.busy_since;
      i.busy_since = now_;
    }
    i.busy_s = 0.0;
    UtilizationSample s;
    s.t = now_;
    s.instance = i.id;
    s.busy_fraction = span > 0.0 ? busy / span : 0.0;
    s.kv_occupancy = static_cast<double>(i.kv_used_bytes()) /
                     static_cast<double>(i.hw.kv_capacity_bytes);
    utilization_.push_back(s);
  }
  last_tick_ = now_;
  const double next = now_ + config_.utilization_interval_s;
  if (next <= horizon_) {
    Event tick;
    tick.time = next;
    tick.kind = EventKind::kSweepTick;
    push(tick);
  }
}

void Simulator::schedule_idle_work() {
  if (!awaiting_.empty()) {
    const std::vector<std::uint32_t> waiting = awaiting_;
    for (std::uint32_t r : waiting) {
      if (requests_[r].state == RequestState::kAwaitingTransfer) {
        apply(policy_.dispatch(*this, r));
      }
    }
  }
  for (int pass = 0; pass < 4; ++pass) {
    bool started = false;
    for (Instance& i : instances_) {
      if (!i.idle() || i.halting) continue;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) policy_error("capacity pressure never resolved");
        Work w = policy_.next_work(*this, i.id);
        apply(w.prelude);
        if (w.kind == Work::Kind::kIdle) break;
        if (w.kind == Work::Kind::kPrefill) {
          start_prefill(i.id, w.request);
          started = true;
          break;
        }
        std::uint64_t growth = 0;
        for (std::uint32_t m : w.batch) {
          if (requests_.at(m).reserved_tokens == 0) ++growth;
        }
        if (growth > i.free_tokens()) {
          const std::vector<Action> relief =
              policy_.on_capacity_pressure(*this, i.id, growth - i.free_tokens());
          if (relief.empty()) policy_error("capacity pressure left unresolved");
          apply(relief);
          continue;
        }
        step_decode(i.id, std::move(w.batch));
        started = true;
        break;
      }
    }
    if (!started) break;
  }
}

// Policy defaults.

std::vector<Action> Policy::on_capacity_pressure(const ClusterView& view,
                                                 int instance,
                                                 std::uint64_t needed_tokens) {
  std::vector<std::uint32_t> victims =
      newest_offline_victims(view, instance, needed_tokens);
  if (victims.empty()) return {};
  return {EvictAction{instance, std::move(victims)}};
}

void Policy::on_preempted(std::uint32_t, double) {}
void Policy::on_evicted(std::uint32_t, double) {}

std::vector<std::uint32_t> newest_offline_victims(const ClusterView& view,
                                                  int instance,
                                                  std::uint64_t needed_tokens) {
  const Instance& i = view.instances()[static_cast<std::size_t>(instance)];
  std::vector<std::uint32_t> victims;
  std::uint64_t freed = 0;
  for (auto it = i.decoding.rbegin(); it != i.decoding.rend() && freed < needed_tokens;
       ++it) {
    const Request& r = view.request(*it);
    if (r.online()) continue;
    victims.push_back(*it);
    freed += r.kv_tokens + r.reserved_tokens;
  }
  return victims;
}

}  // namespace colosim
