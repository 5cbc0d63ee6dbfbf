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

#include <benchmark/benchmark.h>

#include <random>

#include "colosim/cluster/simulator.h"
#include "colosim/perf_model/presets.h"
#include "colosim/perf_model/roofline.h"
#include "colosim/scheduler/mix_selection.h"
#include "colosim/scheduler/policies.h"

namespace colosim {
namespace {

void BM_DecodeLatency(benchmark::State& state) {
  const ModelSpec model = qwen25_7b();
  const HardwareProfile hw = reference_profile();
  std::vector<std::uint64_t> ctx(static_cast<std::size_t>(state.range(0)), 1500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_decode_latency(model, hw, ctx.data(), ctx.size()));
  }
}
BENCHMARK(BM_DecodeLatency)->Arg(1)->Arg(64)->Arg(512);

void BM_PrefillLatency(benchmark::State& state) {
  const ModelSpec model = qwen25_7b();
  const HardwareProfile hw = reference_profile();
  const BatchDescriptor b = BatchDescriptor::prefill({static_cast<std::uint64_t>(state.range(0))});
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_iteration(model, hw, b));
  }
}
BENCHMARK(BM_PrefillLatency)->Arg(512)->Arg(8192);

void BM_MixSelection(benchmark::State& state) {
  const ModelSpec model = qwen25_7b();
  const HardwareProfile hw = reference_profile();
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::uint64_t> len(100, 6000);
  std::vector<Candidate> online, offline;
  for (std::uint32_t k = 0; k < 32; ++k) online.push_back({k, len(gen)});
  for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(state.range(0)); ++k) {
    offline.push_back({1000 + k, len(gen)});
  }
  const BatchPredictor predict = [&](std::span<const Candidate> b) {
    std::vector<std::uint64_t> ctx;
    ctx.reserve(b.size());
    for (const Candidate& c : b) ctx.push_back(c.length);
    return estimate_decode_latency(model, hw, ctx.data(), ctx.size());
  };
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mix_decoding_selection(online, offline, 0.1, predict, 8, rng));
  }
}
BENCHMARK(BM_MixSelection)->Arg(64)->Arg(512);

Trace synthetic(RequestClass cls, double qps, double span, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> gap(qps);
  std::uniform_int_distribution<std::uint32_t> prompt(64, 3000), output(16, 400);
  Trace t;
  double now = 0.0;
  for (int k = 0;; ++k) {
    now += gap(gen);
    if (now > span) break;
    t.records.push_back({now, prompt(gen), output(gen), cls,
                         (cls == RequestClass::kOnline ? "on-" : "off-") + std::to_string(k)});
  }
  return t;
}

void BM_SmallSimulation(benchmark::State& state) {
  ClusterConfig c;
  c.model = qwen25_7b();
  const HardwareProfile hw = reference_profile();
  c.instances = {{InstanceKind::kLatencyRelaxed, hw}, {InstanceKind::kLatencyStrict, hw}};
  const Trace online = synthetic(RequestClass::kOnline, 2.0, 120.0, 1);
  const Trace offline = synthetic(RequestClass::kOffline, 2.0, 120.0, 2);
  SchedulerConfig sc;
  sc.policy = state.range(0) == 0 ? "ooco" : "base_pd";
  for (auto _ : state) {
    auto policy = make_policy(sc, SLOConfig{}, 1);
    SimOptions options;
    options.keep_emit_timestamps = false;
    options.check_invariants = false;
    benchmark::DoNotOptimize(Simulator(c, *policy, options).run(online, offline));
  }
}
BENCHMARK(BM_SmallSimulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace colosim

BENCHMARK_MAIN();
