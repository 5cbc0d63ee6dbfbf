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
#include <functional>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "colosim/cluster/instance.h"
#include "colosim/cluster/invariants.h"
#include "colosim/cluster/policy.h"
#include "colosim/cluster/request.h"
#include "colosim/metrics/metrics_log.h"
#include "colosim/perf_model/types.h"
#include "colosim/workload/trace.h"

namespace colosim {

struct InstanceSpec {
  InstanceKind kind = InstanceKind::kLatencyStrict;
  HardwareProfile hw;
  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

struct ClusterConfig {
  ModelSpec model;
  std::vector<InstanceSpec> instances;
  double transfer_bw = 0.0;  // bytes/s; 0 uses the source's comm_bw
  double drain_s = 300.0;    // simulated time after the last arrival
  double utilization_interval_s = 10.0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const ClusterConfig&, const ClusterConfig&) = default;
};

enum class EventKind : std::uint8_t {
  kTransferDone,
  kDecodeStepDone,
  kPrefillLayerDone,
  kPrefillDone,
  kArrival,
  kPullSignal,
  kSweepTick,
};

std::string_view to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  std::uint64_t seq = 0;
  int instance = -1;
  std::uint32_t request = 0;
  std::uint64_t generation = 0;
  int source = -1;  // strict instance behind a PullSignal
  LengthPreference pref;
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct SimOptions {
  std::ostream* event_log = nullptr;  // JSONL, one line per processed event
  bool keep_emit_timestamps = true;
  bool check_invariants = true;
};

// Single-threaded discrete-event engine. The policy decides; the engine
// validates and applies every state change.
class Simulator final : public ClusterView {
 public:
  Simulator(ClusterConfig config, Policy& policy, SimOptions options = {});

  // Loads traces and runs to the horizon.
  MetricsLog run(const Trace& online, const Trace& offline);

  // Step-wise driving for tests: load, then process events one at a time.
  void load(const Trace& online, const Trace& offline);
  bool step();  // false once the queue is drained or the horizon passed
  MetricsLog finish();

  // Mechanics, also used by the event handlers.
  // Seconds until the running offline Prefill halts.
  double preempt_prefill(int instance);
  std::uint64_t evict(int instance, std::span<const std::uint32_t> victims);
  // Completion time, or nullopt when the destination cannot hold
  // reserve_tokens (no state change).
  std::optional<double> migrate_kv(std::uint32_t request, int from, int to,
                                   std::uint64_t reserve_tokens);
  // Schedules DecodeStepDone and returns the step latency.
  double step_decode(int instance, std::vector<std::uint32_t> batch);

  // ClusterView
  double now() const override { return now_; }
  const ModelSpec& model() const override { return config_.model; }
  std::span<const Instance> instances() const override { return instances_; }
  const Request& request(std::uint32_t index) const override {
    return requests_.at(index);
  }
  std::size_t num_requests() const override { return requests_.size(); }
  std::uint64_t decode_context(std::uint32_t index) const override;
  double decode_latency(int instance,
                        std::span<const std::uint64_t> contexts) const override;
  double prefill_latency(int instance, std::uint64_t tokens) const override;

  const InvariantMonitor& monitor() const { return monitor_; }
  double horizon() const { return horizon_; }

 private:
  void push(Event e);
  void handle(const Event& e);
  void on_arrival(const Event& e);
  void on_prefill_halt(const Event& e);
  void on_prefill_done(const Event& e);
  void on_decode_step_done(const Event& e);
  void on_transfer_done(const Event& e);
  void on_pull_signal(const Event& e);
  void on_tick(const Event& e);

  void apply(const std::vector<Action>& actions);
  void apply(const Action& action);
  void enqueue(std::uint32_t request, int instance, bool online_queue);
  void start_prefill(int instance, std::uint32_t request);
  void start_transfer(std::uint32_t request, int to);
  void land(std::uint32_t request, int instance);
  void emit_token(Request& r);
  void complete(Request& r);
  void release_kv(Request& r, Instance& inst);
  void set_busy(Instance& inst, bool busy);
  void schedule_idle_work();
  void log_event(const Event& e);
  Instance& inst(int id) { return instances_.at(static_cast<std::size_t>(id)); }

  ClusterConfig config_;
  Policy& policy_;
  SimOptions options_;
  InvariantMonitor monitor_;

  std::vector<Instance> instances_;
  std::vector<Request> requests_;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::vector<std::uint32_t> awaiting_;  // AwaitingTransfer, ascending index
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  double horizon_ = 0.0;
  std::size_t next_arrival_ = 0;
  EventCounts counts_;
  std::vector<UtilizationSample> utilization_;
  double last_tick_ = 0.0;
  double max_preemption_delay_ = 0.0;
};

}  // namespace colosim
