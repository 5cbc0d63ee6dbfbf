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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace colosim {

struct SweepPoint {
  double offline_qps = 0.0;
  double violation_rate = 0.0;      // online
  double offline_goodput = 0.0;     // tokens/s
  double offline_completion = 1.0;  // fraction of offline arrivals completed
  bool pass = false;
  std::uint64_t invariant_violations = 0;
  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // strictly increasing offline_qps
  double max_effective_offline_qps = 0.0;
  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct SweepSettings {
  std::vector<double> grid;  // 0 is always evaluated first
  int bisection_steps = 4;
  double violation_threshold = 0.03;
  double min_offline_completion = 0.95;
  std::size_t workers = 1;
};

// Evaluates one offline load level; pass is filled in by the sweep.
using PointEvaluator = std::function<SweepPoint(double offline_qps)>;

// Grid scan (parallel over `workers`), then bisection between the last
// passing and the first failing grid point. Throws InfeasibleScenario when
// the zero-offline baseline already breaks the threshold.
SweepResult sweep_max_offline_qps(const PointEvaluator& evaluate,
                                  const SweepSettings& settings);

}  // namespace colosim
