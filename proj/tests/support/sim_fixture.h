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
#include <random>
#include <string>

#include "colosim/cluster/simulator.h"
#include "colosim/perf_model/presets.h"
#include "colosim/workload/trace.h"

namespace colosim::testing {

inline ClusterConfig small_cluster(int relaxed, int strict,
                                   std::uint64_t kv_bytes = 32ull << 30) {
  ClusterConfig c;
  c.model = qwen25_7b();
  HardwareProfile hw = reference_profile();
  hw.kv_capacity_bytes = kv_bytes;
  for (int k = 0; k < relaxed; ++k) c.instances.push_back({InstanceKind::kLatencyRelaxed, hw});
  for (int k = 0; k < strict; ++k) c.instances.push_back({InstanceKind::kLatencyStrict, hw});
  c.drain_s = 600.0;
  return c;
}

inline Trace poisson_trace(RequestClass cls, double qps, double span_s,
                           std::uint32_t max_prompt, std::uint32_t max_output,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(qps);
  std::uniform_int_distribution<std::uint32_t> prompt(16, max_prompt);
  std::uniform_int_distribution<std::uint32_t> output(1, max_output);
  Trace t;
  const std::string prefix = cls == RequestClass::kOnline ? "on-" : "off-";
  double at = 0.0;
  for (std::size_t k = 0;; ++k) {
    at += gap(rng);
    if (at > span_s) break;
    t.records.push_back({at, prompt(rng), output(rng), cls, prefix + std::to_string(k)});
  }
  return t;
}

}  // namespace colosim::testing
