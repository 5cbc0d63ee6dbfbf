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

#include "colosim/metrics/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "colosim/common/errors.h"

namespace colosim {

namespace {

bool passes(const SweepPoint& p, const SweepSettings& s) {
  if (p.violation_rate > s.violation_threshold) return false;
  return p.offline_qps == 0.0 || p.offline_completion >= s.min_offline_completion;
}

std::vector<SweepPoint> evaluate_all(const PointEvaluator& evaluate,
                                     const std::vector<double>& qps,
                                     std::size_t workers) {
  std::vector<SweepPoint> out(qps.size());
  std::vector<std::exception_ptr> errors(qps.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < qps.size(); k = next++) {
      try {
        out[k] = evaluate(qps[k]);
        out[k].offline_qps = qps[k];
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, qps.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

SweepResult sweep_max_offline_qps(const PointEvaluator& evaluate,
                                  const SweepSettings& settings) {
  std::vector<double> grid = settings.grid;
  for (double q : grid) {
    if (!std::isfinite(q) || q < 0.0) {
      throw ConfigError("sweep.qps_grid: values must be finite and >= 0");
    }
  }
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SweepResult result;
  result.points = evaluate_all(evaluate, grid, settings.workers);
  for (SweepPoint& p : result.points) p.pass = passes(p, settings);
  if (!result.points.front().pass) {
    throw InfeasibleScenario(
        "online trace alone violates the SLO (violation rate " +
        std::to_string(result.points.front().violation_rate) +
        " at offline qps 0); rescale it with scale-trace --mode down");
  }

  std::size_t first_fail = result.points.size();
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    if (!result.points[k].pass) {
      first_fail = k;
      break;
    }
  }
  if (first_fail == result.points.size()) {
    result.max_effective_offline_qps = result.points.back().offline_qps;
    return result;
  }

  double lo = result.points[first_fail - 1].offline_qps;
  double hi = result.points[first_fail].offline_qps;
  for (int step = 0; step < settings.bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    SweepPoint p = evaluate(mid);
    p.offline_qps = mid;
    p.pass = passes(p, settings);
    result.points.push_back(p);
    (p.pass ? lo : hi) = mid;
  }
  std::sort(result.points.begin(), result.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.offline_qps < b.offline_qps;
            });
  result.max_effective_offline_qps = lo;
  return result;
}

}  // namespace colosim
