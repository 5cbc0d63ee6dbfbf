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

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "colosim/common/errors.h"
#include "colosim/perf_model/roofline.h"
#include "colosim/scheduler/policies.h"
#include "support/sim_fixture.h"

namespace colosim {
namespace {

using testing::poisson_trace;
using testing::small_cluster;

ModelSpec unit_model() {
  ModelSpec m;
  m.num_layers = 1;
  m.hidden_dim = 1;
  m.num_q_heads = 1;
  m.num_kv_heads = 1;
  m.head_dim = 1;
  m.mlp_intermediate_dim = 1;
  m.vocab_dim = 1;
  m.bytes_per_value = 2;
  return m;
}

HardwareProfile unit_profile() {
  HardwareProfile hw;
  hw.gemm_flops = hw.prefill_attn_flops = hw.decode_attn_flops = 1e3;
  hw.gemm_bw = hw.attn_bw = 1e3;
  hw.comm_bw = 1e3;
  hw.prefill_overhead_s = 0.002;
  hw.decode_overhead_s = 0.001;
  hw.kv_capacity_bytes = 1 << 20;
  return hw;
}

ClusterConfig unit_cluster() {
  ClusterConfig c;
  c.model = unit_model();
  c.instances = {{InstanceKind::kLatencyRelaxed, unit_profile()},
                 {InstanceKind::kLatencyStrict, unit_profile()}};
  return c;
}

TraceRecord rec(std::string id, double t, std::uint32_t p, std::uint32_t o,
                RequestClass cls = RequestClass::kOnline) {
  return {t, p, o, cls, std::move(id)};
}

TraceRecord off(std::string id, std::uint32_t p, std::uint32_t o = 8) {
  return rec(std::move(id), 0.0, p, o, RequestClass::kOffline);
}

// Prefills FCFS on instance 0, keeps results there and never decodes.
class HoldPolicy final : public Policy {
 public:
  std::string_view name() const override { return "hold"; }
  void reset(const ClusterView&) override {}
  std::vector<Action> on_arrival(const ClusterView&, std::uint32_t r) override {
    return {EnqueueAction{r, 0, true}};
  }
  Work next_work(const ClusterView& view, int id) override {
    const Instance& i = view.instances()[static_cast<std::size_t>(id)];
    if (i.relaxed() && !i.online_prefill_q.empty()) {
      return Work::prefill(i.online_prefill_q.front());
    }
    return Work::idle();
  }
  std::vector<Action> dispatch(const ClusterView&, std::uint32_t r) override {
    return {KeepLocalAction{r}};
  }
  std::vector<Action> after_decode_step(const ClusterView&, int,
                                        std::span<const std::uint32_t>) override {
    return {};
  }
  std::vector<Action> on_pull(const ClusterView&, int, int, LengthPreference) override {
    return {};
  }
};

Trace offline_only(std::vector<TraceRecord> records) {
  Trace t;
  t.records = std::move(records);
  return t;
}

void run_until(Simulator& sim, std::uint32_t request, RequestState state) {
  while (sim.request(request).state != state) {
    ASSERT_TRUE(sim.step()) << "queue drained before reaching the state";
  }
}

TEST(Lifecycle, TransitionGraph) {
  using S = RequestState;
  EXPECT_TRUE(is_legal_transition(S::kQueued, S::kPrefilling));
  EXPECT_TRUE(is_legal_transition(S::kPrefilling, S::kQueued));
  EXPECT_TRUE(is_legal_transition(S::kDecoding, S::kEvicted));
  EXPECT_TRUE(is_legal_transition(S::kEvicted, S::kPrefilling));
  EXPECT_FALSE(is_legal_transition(S::kQueued, S::kDecoding));
  EXPECT_FALSE(is_legal_transition(S::kComplete, S::kQueued));
  EXPECT_FALSE(is_legal_transition(S::kEvicted, S::kDecoding));
  Request r;
  EXPECT_THROW(r.transition(S::kComplete), std::logic_error);
}

TEST(Run, EmptyTracesGiveEmptyLog) {
  BasePdPolicy policy;
  Simulator sim(unit_cluster(), policy);
  const MetricsLog log = sim.run({}, {});
  EXPECT_TRUE(log.requests.empty());
  EXPECT_EQ(log.counts.events, 0u);
}

TEST(Run, RejectsRosterWithoutStrictInstance) {
  ClusterConfig c = unit_cluster();
  c.instances.pop_back();
  BasePdPolicy policy;
  EXPECT_THROW(Simulator(c, policy), ConfigError);
}

TEST(Run, OversizedRequestIsInfeasible) {
  BasePdPolicy policy;
  Simulator sim(unit_cluster(), policy);
  Trace t;
  t.records = {rec("huge", 0.0, 200000, 100000)};
  try {
    sim.run(t, {});
    FAIL() << "expected InfeasibleScenario";
  } catch (const InfeasibleScenario& e) {
    EXPECT_NE(std::string(e.what()).find("huge"), std::string::npos);
  }
}

struct OracleRow {
  double first = 0.0, completion = 0.0, tpot = -1.0;
};

std::map<std::string, OracleRow> load_pd_oracle(Trace& trace) {
  std::ifstream in(COLOSIM_TEST_DATA "/pd_unit_oracle.csv");
  std::string line;
  std::getline(in, line);
  std::map<std::string, OracleRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[7];
    for (auto& x : f) std::getline(ss, x, ',');
    trace.records.push_back(rec(f[0], std::stod(f[1]),
                                static_cast<std::uint32_t>(std::stoul(f[2])),
                                static_cast<std::uint32_t>(std::stoul(f[3]))));
    rows[f[0]] = {std::stod(f[4]), std::stod(f[5]), f[6].empty() ? -1.0 : std::stod(f[6])};
  }
  return rows;
}

class UnitModelTrace : public ::testing::TestWithParam<std::string> {};

TEST_P(UnitModelTrace, MatchesHandTracedDisaggregatedRun) {
  Trace online;
  const auto expected = load_pd_oracle(online);
  ASSERT_EQ(expected.size(), 5u);
  SchedulerConfig sc;
  sc.policy = GetParam();
  auto policy = make_policy(sc, SLOConfig{}, 1);
  Simulator sim(unit_cluster(), *policy);
  const MetricsLog log = sim.run(online, {});
  ASSERT_EQ(log.requests.size(), expected.size());
  for (const RequestRecord& r : log.requests) {
    const OracleRow& o = expected.at(r.id);
    EXPECT_NEAR(r.first_token_ts, o.first, 1e-12) << r.id;
    EXPECT_NEAR(r.completion_ts, o.completion, 1e-12) << r.id;
    if (o.tpot >= 0.0) {
      EXPECT_NEAR((r.last_token_ts - r.first_token_ts) / (r.tokens_emitted - 1), o.tpot,
                  1e-12)
          << r.id;
    }
    EXPECT_EQ(r.tokens_emitted, r.output_len);
  }
  EXPECT_TRUE(log.invariant_violations.empty());
}

INSTANTIATE_TEST_SUITE_P(Policies, UnitModelTrace,
                         ::testing::Values("base_pd", "ooco", "online_priority"));

TEST(UnitModelTrace, SingleRequestTtftIsPrefillPlusTransfer) {
  Trace online;
  online.records = {rec("solo", 1.0, 8, 3)};
  BasePdPolicy policy;
  Simulator sim(unit_cluster(), policy);
  const MetricsLog log = sim.run(online, {});
  const double prefill = predict_iteration_latency(unit_model(), unit_profile(),
                                                   BatchDescriptor::prefill({8}));
  const double transfer = kv_cache_bytes(unit_model(), 8) / 1e3;
  const double step1 = predict_iteration_latency(unit_model(), unit_profile(),
                                                 BatchDescriptor::decode({9}));
  const double step2 = predict_iteration_latency(unit_model(), unit_profile(),
                                                 BatchDescriptor::decode({10}));
  const RequestRecord& r = log.requests.at(0);
  EXPECT_NEAR(r.first_token_ts - r.arrival, prefill + transfer, 1e-12);
  ASSERT_EQ(r.emit_ts.size(), 3u);
  EXPECT_NEAR(r.emit_ts[1] - r.emit_ts[0], step1, 1e-12);
  EXPECT_NEAR(r.emit_ts[2] - r.emit_ts[1], step2, 1e-12);
}

class Preemption : public ::testing::Test {
 protected:
  double layer_latency() const {
    return estimate_iteration(qwen25_7b(), reference_profile(),
                              BatchDescriptor::prefill({2048}))
               .total() /
           28.0;
  }

  MetricsLog run_with_online_at(double t) {
    SchedulerConfig sc;
    auto policy = make_policy(sc, SLOConfig{}, 3);
    Simulator sim(small_cluster(1, 1), *policy);
    Trace online, offline;
    offline.records = {rec("bulk", 0.0, 2048, 4, RequestClass::kOffline)};
    online.records = {rec("urgent", t, 128, 4)};
    return sim.run(online, offline);
  }
};

TEST_F(Preemption, MidLayerDelayIsRestOfTheLayer) {
  const double layer = layer_latency();
  const MetricsLog log = run_with_online_at(2.5 * layer);
  EXPECT_EQ(log.counts.preemptions, 1u);
  EXPECT_NEAR(log.max_preemption_delay_s, 0.5 * layer, 1e-12);
  EXPECT_LE(log.max_preemption_delay_s, layer);
  EXPECT_TRUE(log.invariant_violations.empty());
  EXPECT_EQ(log.requests[0].preemptions, 1u);
  EXPECT_TRUE(log.requests[0].complete());
  EXPECT_EQ(log.counts.prefill_tokens, 2048u + 128u);
}

TEST_F(Preemption, ExactLayerBoundaryCostsNothing) {
  const double layer = layer_latency();
  const MetricsLog log = run_with_online_at(3.0 * layer);
  EXPECT_EQ(log.counts.preemptions, 1u);
  EXPECT_NEAR(log.max_preemption_delay_s, 0.0, 1e-12);
}

TEST_F(Preemption, ReferenceDelayIsTensOfMilliseconds) {
  const double layer = layer_latency();
  EXPECT_GT(layer, 1e-3);
  EXPECT_LT(layer, 0.05);
  const MetricsLog log = run_with_online_at(0.37 * 28 * layer);
  EXPECT_LT(log.max_preemption_delay_s, 0.05);
}

TEST_F(Preemption, OnlyRunningOfflinePrefillCanBePreempted) {
  HoldPolicy policy;
  Simulator sim(small_cluster(1, 1), policy);
  Trace online;
  online.records = {rec("o", 0.0, 64, 4)};
  sim.load(online, {});
  EXPECT_THROW(sim.preempt_prefill(0), std::logic_error);  // idle
  ASSERT_TRUE(sim.step());
  EXPECT_THROW(sim.preempt_prefill(0), std::logic_error);  // online work
}

TEST(Evict, FreesContextBytesAndRecomputes) {
  SchedulerConfig sc;
  auto policy = make_policy(sc, SLOConfig{}, 3);
  Simulator sim(small_cluster(1, 1), *policy);
  Trace offline;
  offline.records = {rec("victim", 0.0, 1024, 6, RequestClass::kOffline)};
  sim.load({}, offline);
  run_until(sim, 0, RequestState::kDecoding);
  ASSERT_EQ(sim.request(0).kv_tokens, 1024u);
  const int where = sim.request(0).instance;
  const std::uint64_t before = sim.instances()[where].kv_used_bytes();
  const std::vector<std::uint32_t> victims = {0};
  EXPECT_EQ(sim.evict(where, victims), 58720256u);
  EXPECT_EQ(before - sim.instances()[where].kv_used_bytes(), 58720256u);
  EXPECT_EQ(sim.request(0).state, RequestState::kEvicted);
  EXPECT_EQ(sim.request(0).prefill_tokens, 1025u);
  EXPECT_EQ(sim.evict(where, {}), 0u);
  while (sim.step()) {
  }
  const MetricsLog log = sim.finish();
  EXPECT_TRUE(log.invariant_violations.empty());
  EXPECT_EQ(log.requests[0].tokens_emitted, 6u);
  EXPECT_EQ(log.requests[0].evictions, 1u);
  EXPECT_EQ(log.counts.recompute_tokens, 1025u);
  EXPECT_EQ(log.counts.prefill_tokens, 1024u + 1025u);
  for (std::size_t k = 1; k < log.requests[0].emit_ts.size(); ++k) {
    EXPECT_LT(log.requests[0].emit_ts[k - 1], log.requests[0].emit_ts[k]);
  }
}

TEST(Evict, OnlineVictimIsAHardError) {
  BasePdPolicy policy;
  Simulator sim(small_cluster(1, 1), policy);
  Trace online;
  online.records = {rec("o", 0.0, 64, 4)};
  sim.load(online, {});
  run_until(sim, 0, RequestState::kDecoding);
  const std::vector<std::uint32_t> victims = {0};
  EXPECT_THROW(sim.evict(1, victims), std::logic_error);
}

class Mechanics : public ::testing::Test {
 protected:
  void SetUp() override {
    ClusterConfig c = small_cluster(1, 1);
    c.transfer_bw = 1e10;
    sim_ = std::make_unique<Simulator>(c, policy_);
    Trace online;
    online.records = {off("a", 1024), off("b", 100), off("c", 300)};
    sim_->load({}, online);
    run_until(*sim_, 2, RequestState::kDecoding);
  }

  HoldPolicy policy_;
  std::unique_ptr<Simulator> sim_;
};

TEST_F(Mechanics, MigrationTimeIsContextBytesOverBandwidth) {
  const double now = sim_->now();
  const auto done = sim_->migrate_kv(0, 0, 1, 1024);
  ASSERT_TRUE(done.has_value());
  EXPECT_NEAR(*done - now, 58720256.0 / 1e10, 1e-15);
  EXPECT_NEAR(*done - now, 0.00587, 1e-5);
  EXPECT_EQ(sim_->request(0).state, RequestState::kTransferring);
  EXPECT_EQ(sim_->instances()[1].kv_reserved_tokens, 1024u);
  ASSERT_TRUE(sim_->step());
  EXPECT_DOUBLE_EQ(sim_->now(), *done);
  EXPECT_EQ(sim_->request(0).instance, 1);
  EXPECT_EQ(sim_->instances()[1].kv_used_tokens, 1024u);
  EXPECT_EQ(sim_->instances()[0].kv_used_tokens, 400u);
}

TEST_F(Mechanics, MigrationRefusedWhenDestinationFull) {
  const std::uint64_t too_much = sim_->instances()[1].capacity_tokens() + 1;
  EXPECT_FALSE(sim_->migrate_kv(0, 0, 1, too_much).has_value());
  EXPECT_EQ(sim_->request(0).state, RequestState::kDecoding);
  EXPECT_EQ(sim_->instances()[1].kv_reserved_tokens, 0u);
  EXPECT_EQ(sim_->instances()[0].kv_used_tokens, 1424u);
}

TEST_F(Mechanics, DecodeStepMatchesPredictorAndGrowsKv) {
  const std::uint64_t before = sim_->instances()[0].kv_used_bytes();
  const double latency = sim_->step_decode(0, {0, 1, 2});
  const double expected = predict_iteration_latency(
      qwen25_7b(), reference_profile(), BatchDescriptor::decode({1025, 101, 301}));
  EXPECT_EQ(latency, expected);
  ASSERT_TRUE(sim_->step());
  EXPECT_EQ(sim_->instances()[0].kv_used_bytes() - before,
            3 * kv_cache_bytes(qwen25_7b(), 1));
  EXPECT_EQ(sim_->request(1).tokens_emitted, 2u);
}

TEST_F(Mechanics, DecodeStepThatOutgrowsThePoolIsRejected) {
  ClusterConfig c = small_cluster(1, 1, kv_cache_bytes(qwen25_7b(), 1100));
  HoldPolicy policy;
  Simulator sim(c, policy);
  Trace online;
  online.records = {off("a", 1000), off("b", 100)};
  sim.load({}, online);
  run_until(sim, 1, RequestState::kDecoding);
  EXPECT_THROW(sim.step_decode(0, {0, 1}), std::logic_error);
}

TEST_F(Mechanics, FinishingBatchCompletesAndFreesKv) {
  ClusterConfig c = small_cluster(1, 1);
  HoldPolicy policy;
  Simulator sim(c, policy);
  Trace online;
  online.records = {off("a", 64, 2)};
  sim.load({}, online);
  run_until(sim, 0, RequestState::kDecoding);
  sim.step_decode(0, {0});
  ASSERT_TRUE(sim.step());
  EXPECT_EQ(sim.request(0).state, RequestState::kComplete);
  EXPECT_EQ(sim.instances()[0].kv_used_tokens, 0u);
}

std::string event_log_of(const std::string& policy_name, std::uint64_t seed,
                         MetricsLog* out) {
  SchedulerConfig sc;
  sc.policy = policy_name;
  auto policy = make_policy(sc, SLOConfig{}, seed);
  std::ostringstream events;
  SimOptions opt;
  opt.event_log = &events;
  Simulator sim(small_cluster(1, 1, 2ull << 30), *policy, opt);
  *out = sim.run(poisson_trace(RequestClass::kOnline, 2.0, 60, 2048, 300, seed),
                 poisson_trace(RequestClass::kOffline, 5.0, 60, 2048, 600, seed + 1));
  return events.str();
}

TEST(Determinism, IdenticalSeedsGiveIdenticalLogs) {
  for (const char* p : {"ooco", "base_pd", "online_priority"}) {
    MetricsLog a, b;
    const std::string ea = event_log_of(p, 11, &a);
    const std::string eb = event_log_of(p, 11, &b);
    EXPECT_FALSE(ea.empty());
    EXPECT_EQ(ea, eb) << p;
    EXPECT_TRUE(a == b) << p;
  }
}

TEST(PolicyIsolation, OocoWithoutOfflineMatchesPlainDisaggregation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Trace online = poisson_trace(RequestClass::kOnline, 4.0, 120, 4096, 400, seed);
    SchedulerConfig ooco;
    SchedulerConfig pd;
    pd.policy = "base_pd";
    auto p1 = make_policy(ooco, SLOConfig{}, seed);
    auto p2 = make_policy(pd, SLOConfig{}, seed);
    Simulator s1(small_cluster(2, 2, 4ull << 30), *p1);
    Simulator s2(small_cluster(2, 2, 4ull << 30), *p2);
    const MetricsLog a = s1.run(online, {});
    const MetricsLog b = s2.run(online, {});
    ASSERT_EQ(a.requests.size(), b.requests.size());
    for (std::size_t k = 0; k < a.requests.size(); ++k) {
      EXPECT_EQ(a.requests[k].first_token_ts, b.requests[k].first_token_ts);
      EXPECT_EQ(a.requests[k].last_token_ts, b.requests[k].last_token_ts);
      EXPECT_EQ(a.requests[k].emit_ts, b.requests[k].emit_ts);
    }
  }
}

struct StressCase {
  std::string policy;
  int relaxed;
  int strict;
  std::uint64_t kv_bytes;
  std::uint64_t seed;
};

class LifecycleInvariants : public ::testing::TestWithParam<StressCase> {};

TEST_P(LifecycleInvariants, HoldAtEveryEvent) {
  const StressCase& c = GetParam();
  SchedulerConfig sc;
  sc.policy = c.policy;
  auto policy = make_policy(sc, SLOConfig{}, c.seed);
  Simulator sim(small_cluster(c.relaxed, c.strict, c.kv_bytes), *policy);
  const Trace online = poisson_trace(RequestClass::kOnline, 3.0, 90, 3000, 400, c.seed);
  const Trace offline = poisson_trace(RequestClass::kOffline, 6.0, 90, 3000, 800, c.seed + 50);
  sim.load(online, offline);
  while (sim.step()) {
    for (const Instance& i : sim.instances()) {
      ASSERT_LE(i.kv_used_bytes(), i.hw.kv_capacity_bytes);
      if (i.activity == Activity::kDecode && i.relaxed()) {
        for (std::uint32_t m : i.batch) ASSERT_FALSE(sim.request(m).online());
      }
      if (i.strict()) ASSERT_NE(i.activity, Activity::kPrefill);
    }
  }
  const MetricsLog log = sim.finish();
  EXPECT_TRUE(log.invariant_violations.empty()) << log.invariant_violations.front();
  std::uint64_t expected_prefill = 0;
  for (const RequestRecord& r : log.requests) {
    if (r.complete()) {
      EXPECT_EQ(r.tokens_emitted, r.output_len) << r.id;
      EXPECT_GE(r.first_token_ts, r.arrival);
    }
    for (std::size_t k = 1; k < r.emit_ts.size(); ++k) {
      ASSERT_LT(r.emit_ts[k - 1], r.emit_ts[k]) << r.id;
    }
    expected_prefill += r.prompt_len;
  }
  if (log.requests.size() ==
      static_cast<std::size_t>(std::count_if(log.requests.begin(), log.requests.end(),
                                             [](const auto& r) { return r.complete(); }))) {
    EXPECT_EQ(log.counts.prefill_tokens, expected_prefill + log.counts.recompute_tokens);
  }
}

std::vector<StressCase> stress_cases() {
  std::vector<StressCase> out;
  for (const char* p : {"ooco", "base_pd", "online_priority"}) {
    out.push_back({p, 1, 1, 1ull << 30, 1});
    out.push_back({p, 2, 1, 1ull << 30, 2});
    out.push_back({p, 1, 2, 512ull << 20, 3});
    out.push_back({p, 2, 2, 4ull << 30, 4});
  }
  return out;
}

INSTANTIATE_TEST_SUITE_P(Scenarios, LifecycleInvariants, ::testing::ValuesIn(stress_cases()));

}  // namespace
}  // namespace colosim
