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

#include "colosim/run.h"

#include <cmath>

#include "colosim/metrics/request_metrics.h"
#include "colosim/scheduler/policies.h"

namespace colosim {

namespace {

double sweep_span(const SimConfig& config, const Trace& online) {
  return config.sweep.offline_span_s > 0.0 ? config.sweep.offline_span_s
                                            : online.span_s();
}

}  // namespace

MetricsLog run(const SimConfig& config, const Trace& online, const Trace& offline,
               SimOptions options) {
  config.validate();
  const auto policy = make_policy(config.scheduler, config.slo, config.seed);
  Simulator sim(config.cluster, *policy, options);
  return sim.run(online, offline);
}

Trace sweep_offline_trace(const SimConfig& config, const Trace& online,
                          std::span<const TraceRecord> lengths, double qps) {
  if (!(qps > 0.0) || lengths.empty()) return {};
  const auto count =
      static_cast<std::size_t>(std::floor(qps * sweep_span(config, online)));
  return offline_stream(lengths, qps, 0.0, count);
}

SweepPoint evaluate_sweep_point(const SimConfig& config, const Trace& online,
                                std::span<const TraceRecord> lengths, double qps) {
  const Trace offline = sweep_offline_trace(config, online, lengths, qps);
  SimOptions options;
  options.keep_emit_timestamps = false;
  const MetricsLog log = run(config, online, offline, options);
  SweepPoint p;
  p.offline_qps = qps;
  p.violation_rate = violation_rate(log, config.slo, ClassFilter::kOnline);
  const double span = sweep_span(config, online);
  p.offline_goodput = offline_goodput(log, span > 0.0 ? span : log.horizon_s);
  p.offline_completion = completion_fraction(log, ClassFilter::kOffline);
  p.invariant_violations = log.invariant_violations.size();
  return p;
}

SweepResult run_sweep(const SimConfig& config, const Trace& online,
                      std::span<const TraceRecord> lengths, std::size_t workers) {
  SweepSettings s;
  if (!lengths.empty()) s.grid = config.sweep.grid();
  s.bisection_steps = config.sweep.bisection_steps;
  s.violation_threshold = config.slo.violation_threshold;
  s.min_offline_completion = config.sweep.min_offline_completion;
  s.workers = workers;
  return sweep_max_offline_qps(
      [&](double qps) { return evaluate_sweep_point(config, online, lengths, qps); },
      s);
}

}  // namespace colosim
