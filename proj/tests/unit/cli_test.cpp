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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "colosim/config/manifest.h"
#include "colosim/config/sim_config.h"
#include "colosim/perf_model/presets.h"
#include "colosim/workload/trace.h"
#include "support/calibration_fixture.h"
#include "support/sim_fixture.h"

namespace colosim {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "colosim");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("colosim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_trace(path("online.csv"),
                testing::poisson_trace(RequestClass::kOnline, 1.0, 60, 1500, 100, 1));
    write_trace(path("offline.csv"),
                testing::poisson_trace(RequestClass::kOffline, 1.0, 60, 2000, 200, 2));
    unsetenv("COLOSIM_SEED");
  }
  void TearDown() override {
    unsetenv("COLOSIM_SEED");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateWritesOutputsAndManifest) {
  const Result r = cli({"simulate", "--online-trace", path("online.csv"), "--offline-trace",
                        path("offline.csv"), "--out", path("run"), "--verbose-events"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"requests.csv", "utilization.csv", "summary.json", "events.jsonl",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const RunManifest m = load_manifest(dir_ / "run" / "manifest.json");
  EXPECT_EQ(m.command, "simulate");
  EXPECT_EQ(m.online_digest, file_digest(path("online.csv")));
  EXPECT_EQ(m.outputs.size(), 4u);
  EXPECT_EQ(parse_sim_config(m.config_json, "."), default_sim_config());
}

TEST_F(CliTest, RerunFromManifestIsByteIdentical) {
  write("c.json", R"({"cluster": {"relaxed_instances": 2}, "seed": 11})");
  ASSERT_EQ(cli({"simulate", "--config", path("c.json"), "--online-trace", path("online.csv"),
                 "--offline-trace", path("offline.csv"), "--out", path("a"),
                 "--verbose-events"})
                .code,
            0);
  ASSERT_EQ(cli({"simulate", "--from-manifest", path("a/manifest.json"), "--out", path("b")})
                .code,
            0);
  for (const char* f : {"requests.csv", "utilization.csv", "summary.json", "events.jsonl",
                        "manifest.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, ChangedTraceBlocksRerun) {
  ASSERT_EQ(cli({"simulate", "--online-trace", path("online.csv"), "--out", path("a")}).code, 0);
  write_trace(path("online.csv"),
              testing::poisson_trace(RequestClass::kOnline, 1.0, 30, 1500, 100, 9));
  const Result r = cli({"simulate", "--from-manifest", path("a/manifest.json"), "--out", path("b")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("changed"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsExitTwoNamingTheField) {
  Result r = cli({"simulate", "--online-trace", path("online.csv"), "--out", path("a"),
                  "--policy", "unknown"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("scheduler.policy"), std::string::npos);

  write("bad.json", R"({"metrics": {"ttft_slo": -1}})");
  r = cli({"simulate", "--config", path("bad.json"), "--online-trace", path("online.csv"),
           "--out", path("a")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("metrics.ttft_slo"), std::string::npos);

  r = cli({"simulate", "--online-trace", path("missing.csv"), "--out", path("a")});
  EXPECT_EQ(r.code, 2);
  r = cli({"simulate", "--out", path("a")});
  EXPECT_EQ(r.code, 2);
  r = cli({"simulate", "--online-trace", path("online.csv"), "--out", path("a"), "--seed", "x"});
  EXPECT_EQ(r.code, 2);
  r = cli({});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SeedPrecedence) {
  write("c.json", R"({"seed": 5})");
  const auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"simulate", "--config", path("c.json"), "--online-trace",
                                     path("online.csv"), "--out", path("s")};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(cli(args).code, 0);
    return load_manifest(dir_ / "s" / "manifest.json").seed;
  };
  EXPECT_EQ(seed_of({}), 5u);
  setenv("COLOSIM_SEED", "17", 1);
  EXPECT_EQ(seed_of({}), 17u);
  EXPECT_EQ(seed_of({"--seed", "23"}), 23u);
  setenv("COLOSIM_SEED", "not-a-number", 1);
  EXPECT_EQ(cli({"simulate", "--online-trace", path("online.csv"), "--out", path("s")}).code, 2);
}

TEST_F(CliTest, OversizedRequestIsInfeasible) {
  Trace t;
  t.records = {{0.0, 4000000, 10, RequestClass::kOnline, "huge"}};
  write_trace(path("huge.csv"), t);
  const Result r = cli({"simulate", "--online-trace", path("huge.csv"), "--out", path("a")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("huge"), std::string::npos);
}

TEST_F(CliTest, SweepWithZeroUpperBoundIsSinglePassingPoint) {
  write("c.json", R"({"sweep": {"qps_max": 0}})");
  const Result r = cli({"sweep", "--config", path("c.json"), "--online-trace",
                        path("online.csv"), "--offline-trace", path("offline.csv"), "--out",
                        path("s"), "--workers", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "s" / "sweep.csv"),
            "offline_qps,violation_rate,offline_goodput,offline_completion,pass,"
            "invariant_violations\n0,0,0,1,1,0\n");
}

TEST_F(CliTest, SweepGridWritesRowsAndRerunMatches) {
  write("c.json", R"({"sweep": {"qps_grid": [0.5, 1]}})");
  ASSERT_EQ(cli({"sweep", "--config", path("c.json"), "--online-trace", path("online.csv"),
                 "--offline-trace", path("offline.csv"), "--out", path("s"), "--workers", "2"})
                .code,
            0);
  const std::string csv = slurp(dir_ / "s" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  ASSERT_EQ(cli({"sweep", "--from-manifest", path("s/manifest.json"), "--out", path("t")}).code,
            0);
  EXPECT_EQ(csv, slurp(dir_ / "t" / "sweep.csv"));
  const Result rep = cli({"report", "--run-dir", path("s")});
  EXPECT_EQ(rep.code, 0);
  EXPECT_NE(rep.out.find("max effective offline qps"), std::string::npos);
}

TEST_F(CliTest, ViolatingBaselineIsInfeasible) {
  write("c.json", R"({"metrics": {"ttft_slo": 0.001}, "sweep": {"qps_grid": [1]}})");
  const Result r = cli({"sweep", "--config", path("c.json"), "--online-trace",
                        path("online.csv"), "--offline-trace", path("offline.csv"), "--out",
                        path("s")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("scale-trace --mode down"), std::string::npos);
}

TEST_F(CliTest, ScaleTrace) {
  Result r = cli({"scale-trace", "--in", path("online.csv"), "--out", path("same.csv"),
                  "--mode", "down", "--ratio", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_trace(path("same.csv")), load_trace(path("online.csv")));

  r = cli({"scale-trace", "--in", path("online.csv"), "--out", path("up.jsonl"), "--mode", "up",
           "--factor", "2", "--seed", "4", "--histogram", path("h.csv"), "--bucket-s", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_trace(path("up.jsonl")).size(), 2 * load_trace(path("online.csv")).size());
  EXPECT_TRUE(fs::exists(dir_ / "h.csv"));

  EXPECT_EQ(cli({"scale-trace", "--in", path("online.csv"), "--out", path("x.csv"), "--mode",
                 "sideways"})
                .code,
            2);
  EXPECT_EQ(cli({"scale-trace", "--in", path("online.csv"), "--out", path("x.csv"), "--mode",
                 "down"})
                .code,
            2);
  EXPECT_EQ(cli({"scale-trace", "--in", path("online.csv"), "--out", path("x.csv"), "--mode",
                 "up", "--factor", "0.5"})
                .code,
            2);
}

TEST_F(CliTest, CalibrateWritesLoadableProfile) {
  const CalibrationSet set = testing::synth_samples(qwen25_7b(), reference_profile(), 3, 0.0);
  write_calibration_samples(path("samples.csv"), set);
  const Result r = cli({"calibrate", "--samples", path("samples.csv"), "--out",
                        path("profile.json"), "--model", "qwen2.5-7b"});
  ASSERT_EQ(r.code, 0) << r.err;
  const HardwareProfile hw = load_profile(path("profile.json"));
  EXPECT_LT(mean_relative_error(qwen25_7b(), hw, set.iterations), 0.01);
  EXPECT_EQ(cli({"calibrate", "--samples", path("nope.csv"), "--out", path("p.json")}).code, 2);
}

TEST_F(CliTest, ConfigReference) {
  const Result r = cli({"report", "--config-reference"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, config_reference_markdown());
  EXPECT_EQ(cli({"report"}).code, 2);
}

}  // namespace
}  // namespace colosim
