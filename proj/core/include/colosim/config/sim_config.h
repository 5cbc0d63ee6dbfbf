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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "colosim/cluster/simulator.h"
#include "colosim/scheduler/policies.h"
#include "colosim/scheduler/types.h"

namespace colosim {

struct SweepConfig {
  // Explicit offline QPS grid. When empty, grid_points evenly spaced values
  // in (0, qps_max] are used.
  std::vector<double> qps_grid;
  double qps_max = 0.0;
  std::size_t grid_points = 0;
  int bisection_steps = 4;
  double min_offline_completion = 0.95;
  // Trace whose (prompt_len, output_len) pairs the offline stream cycles.
  std::filesystem::path offline_lengths;
  double offline_span_s = 0.0;  // 0 follows the online trace

  std::vector<double> grid() const;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct SimConfig {
  ClusterConfig cluster;
  SchedulerConfig scheduler;
  SLOConfig slo;
  SweepConfig sweep;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// qwen2.5-7b on the reference profile, one relaxed and one strict instance.
SimConfig default_sim_config();

// Strict JSON schema: unknown keys and wrong types raise ConfigError with
// the dotted field path. Relative paths resolve against base_dir.
SimConfig parse_sim_config(std::string_view json_text,
                           const std::filesystem::path& base_dir);
SimConfig load_sim_config(const std::filesystem::path& path);

// Fully resolved snapshot; parse_sim_config(to_json(c)) == c.
std::string to_json(const SimConfig& config);

// Markdown table of every key with its default.
std::string config_reference_markdown();

std::string profile_to_json(const HardwareProfile& hw);
HardwareProfile load_profile(const std::filesystem::path& path);

std::vector<std::string> model_preset_names();
ModelSpec model_preset(const std::string& name);

}  // namespace colosim
