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
#include <span>

#include "colosim/cluster/simulator.h"
#include "colosim/config/sim_config.h"
#include "colosim/metrics/metrics_log.h"
#include "colosim/metrics/sweep.h"
#include "colosim/workload/trace.h"

namespace colosim {

// One simulation with the configured policy and seed.
MetricsLog run(const SimConfig& config, const Trace& online,
               const Trace& offline, SimOptions options = {});

// Uniform offline arrivals over the sweep span, cycling `lengths`.
Trace sweep_offline_trace(const SimConfig& config, const Trace& online,
                          std::span<const TraceRecord> lengths, double qps);

SweepPoint evaluate_sweep_point(const SimConfig& config, const Trace& online,
                                std::span<const TraceRecord> lengths,
                                double qps);

SweepResult run_sweep(const SimConfig& config, const Trace& online,
                      std::span<const TraceRecord> lengths, std::size_t workers);

}  // namespace colosim
