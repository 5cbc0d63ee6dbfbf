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

#include <random>
#include <vector>

#include "colosim/perf_model/calibration.h"
#include "colosim/perf_model/roofline.h"

namespace colosim::testing {

// Profiling-style sample set: Prefill at several prompt lengths and Decode
// at batch sizes on both sides of the GEMM ridge point, with mixed
// contexts. `noise` is the half-width of a uniform multiplicative error.
inline CalibrationSet synth_samples(const ModelSpec& model,
                                    const HardwareProfile& truth,
                                    std::uint64_t seed, double noise,
                                    int repeats = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> ctx(64, 1024);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  CalibrationSet set;
  auto add = [&](BatchDescriptor b) {
    double t = predict_iteration_latency(model, truth, b);
    if (noise > 0.0) t *= 1.0 + jitter(rng);
    set.iterations.push_back({std::move(b), t});
  };
  for (int r = 0; r < repeats; ++r) {
    for (std::uint64_t len : {32u, 128u, 512u, 1024u, 2048u, 4096u, 8192u}) {
      add(BatchDescriptor::prefill({len + r * 7}));
    }
    add(BatchDescriptor::prefill({300, 700, 1200}));
    for (std::uint64_t bs : {1u, 4u, 16u, 48u, 128u, 256u, 400u, 640u}) {
      std::vector<std::uint64_t> lengths(bs);
      for (auto& l : lengths) l = ctx(rng);
      add(BatchDescriptor::decode(std::move(lengths)));
    }
    for (std::uint64_t bs : {2u, 32u}) {
      add(BatchDescriptor::decode(std::vector<std::uint64_t>(bs, 16)));
    }
  }
  return set;
}

}  // namespace colosim::testing
