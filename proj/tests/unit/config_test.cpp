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

#include <filesystem>
#include <fstream>

#include "colosim/common/errors.h"
#include "colosim/config/manifest.h"
#include "colosim/config/sim_config.h"
#include "colosim/perf_model/presets.h"

namespace colosim {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_sim_config(text, ".");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "colosim_config_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(SimConfig, EmptyDocumentGivesDefaults) {
  const SimConfig c = parse_sim_config("{}", ".");
  EXPECT_EQ(c, default_sim_config());
  EXPECT_EQ(c.scheduler.policy, "ooco");
  EXPECT_EQ(c.slo.tpot_slo, 0.1);
  EXPECT_EQ(c.slo.violation_threshold, 0.03);
  EXPECT_EQ(c.cluster.instances.size(), 2u);
  EXPECT_NO_THROW(c.validate());
}

TEST(SimConfig, ParsesSections) {
  const SimConfig c = parse_sim_config(R"({
    "seed": 42,
    "perf_model": {"model": {"preset": "qwen2.5-72b-tp4"}, "capacity_threshold": 0.9},
    "cluster": {"relaxed_instances": 2, "strict_instances": 3, "drain_s": 10},
    "scheduler": {"policy": "base_pd", "k_random": 4, "selection_mode": "sacrifice"},
    "metrics": {"tpot_slo": 0.05, "violation_threshold": 0.01},
    "sweep": {"qps_grid": [1, 2.5], "bisection_steps": 2}
  })", ".");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.cluster.model, model_preset("qwen2.5-72b-tp4"));
  EXPECT_EQ(c.scheduler.capacity_threshold, 0.9);
  EXPECT_EQ(c.cluster.instances.size(), 5u);
  EXPECT_EQ(c.cluster.drain_s, 10.0);
  EXPECT_EQ(c.scheduler.policy, "base_pd");
  EXPECT_EQ(c.scheduler.k_random, 4u);
  EXPECT_EQ(c.scheduler.overload_mode, OverloadMode::kSacrifice);
  EXPECT_EQ(c.slo.tpot_slo, 0.05);
  EXPECT_EQ(c.sweep.qps_grid, (std::vector<double>{1, 2.5}));
  EXPECT_EQ(c.sweep.bisection_steps, 2);
}

TEST(SimConfig, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"scheduler": {"polcy": "ooco"}})").find("scheduler.polcy"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(error_of(R"({"scheduler": {"policy": "fifo"}})").find("scheduler.policy"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"metrics": {"tpot_slo": "fast"}})").find("metrics.tpot_slo"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"cluster": {"strict_instances": -1}})").find("cluster.strict_instances"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"metrics": {"violation_threshold": 2}})").find("metrics.violation_threshold"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"perf_model": {"model": {"preset": "gpt"}}})").find("preset"),
            std::string::npos);
  EXPECT_NE(error_of("{not json").find("config"), std::string::npos);
  EXPECT_NE(error_of(R"({"cluster": {"strict_instances": 0}})"), "");
}

TEST(SimConfig, SnapshotRoundTrips) {
  SimConfig c = parse_sim_config(R"({
    "seed": 7,
    "cluster": {"relaxed_instances": 3, "strict_instances": 2, "transfer_bw": 5e10,
                "strict_hardware": {"preset": "reference", "decode_overhead_s": 0.004}},
    "scheduler": {"policy": "online_priority", "decode_cap": 12, "spike_factor": 2.0},
    "sweep": {"qps_max": 8, "grid_points": 4}
  })", ".");
  const std::string snap = to_json(c);
  EXPECT_EQ(parse_sim_config(snap, "."), c);
  EXPECT_EQ(to_json(parse_sim_config(snap, ".")), snap);
  EXPECT_EQ(c.sweep.grid(), (std::vector<double>{2, 4, 6, 8}));
}

TEST(SimConfig, ProfileFileResolvesAgainstBaseDir) {
  HardwareProfile hw = reference_profile();
  hw.gemm_flops = 1.5e14;
  {
    std::ofstream(scratch("profile.json")) << profile_to_json(hw);
  }
  EXPECT_EQ(load_profile(scratch("profile.json")), hw);
  const SimConfig c = parse_sim_config(
      R"({"perf_model": {"hardware": {"profile_file": "profile.json"}}})",
      scratch("profile.json").parent_path());
  EXPECT_EQ(c.cluster.instances.front().hw.gemm_flops, 1.5e14);
  EXPECT_THROW(parse_sim_config(R"({"perf_model": {"hardware": {"profile_file": "missing.json"}}})",
                                scratch("x").parent_path()),
               ConfigError);
}

TEST(SimConfig, ReferencePageListsEveryKey) {
  const std::string page = config_reference_markdown();
  for (const char* key : {"perf_model.capacity_threshold", "cluster.relaxed_instances",
                          "scheduler.k_random", "scheduler.selection_mode",
                          "metrics.tpot_slo", "sweep.qps_grid", "seed"}) {
    EXPECT_NE(page.find(key), std::string::npos) << key;
  }
}

TEST(Manifest, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(fnv1a64("bar", fnv1a64("foo")), fnv1a64("foobar"));
}

TEST(Manifest, FileDigest) {
  std::ofstream(scratch("digest.txt")) << "foobar";
  EXPECT_EQ(file_digest(scratch("digest.txt")), "fnv1a64:85944171f73967e8");
  EXPECT_THROW(file_digest(scratch("absent.txt")), std::exception);
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.tool_version = std::string(tool_version());
  m.command = "simulate";
  m.config_json = to_json(default_sim_config());
  m.seed = 99;
  m.policy = "ooco";
  m.online_trace = "/data/online.csv";
  m.online_digest = "fnv1a64:0000000000000001";
  m.verbose_events = true;
  m.outputs = {"requests.csv", "summary.json"};
  EXPECT_EQ(parse_manifest(manifest_json(m)), m);
  EXPECT_FALSE(tool_version().empty());
  EXPECT_THROW(parse_manifest("[]"), ConfigError);
}

}  // namespace
}  // namespace colosim
