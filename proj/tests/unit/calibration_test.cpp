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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "colosim/common/errors.h"
#include "colosim/perf_model/calibration.h"
#include "colosim/perf_model/presets.h"
#include "colosim/perf_model/roofline.h"
#include "support/calibration_fixture.h"

namespace colosim {
namespace {

TEST(Calibrate, EmptySetIsUnderDetermined) {
  try {
    calibrate(qwen25_7b(), {}, reference_profile());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gemm_flops"), std::string::npos);
  }
}

TEST(Calibrate, MissingPhaseNamesItsParameters) {
  CalibrationSet set = testing::synth_samples(qwen25_7b(), reference_profile(), 1, 0.0);
  std::erase_if(set.iterations, [](const CalibrationSample& s) {
    return s.batch.phase == Phase::kDecode;
  });
  try {
    calibrate(qwen25_7b(), set, reference_profile());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("decode_attn_flops"), std::string::npos) << what;
    EXPECT_NE(what.find("decode_overhead_s"), std::string::npos) << what;
    EXPECT_EQ(what.find("prefill_overhead_s"), std::string::npos) << what;
  }
}

TEST(Calibrate, NoiseFreeRoundTrip) {
  const HardwareProfile truth = reference_profile();
  const CalibrationSet set = testing::synth_samples(qwen25_7b(), truth, 5, 0.0);
  HardwareProfile start = truth;
  start.gemm_flops *= 3.0;
  start.attn_bw *= 0.2;
  const CalibrationResult fit = calibrate(qwen25_7b(), set, start);
  for (const CalibrationSample& s : set.iterations) {
    const double got = predict_iteration_latency(qwen25_7b(), fit.profile, s.batch);
    EXPECT_LE(std::abs(got - s.observed_s) / s.observed_s, 0.01);
  }
  EXPECT_EQ(fit.profile.kv_capacity_bytes, start.kv_capacity_bytes);
  EXPECT_EQ(fit.profile.comm_bw, start.comm_bw);
}

TEST(Calibrate, FitsCommBandwidthFromTransfers) {
  const HardwareProfile truth = reference_profile();
  CalibrationSet set = testing::synth_samples(qwen25_7b(), truth, 9, 0.0);
  for (std::uint64_t tokens : {128u, 1024u, 4096u}) {
    set.transfers.push_back(
        {tokens, comm_latency(kv_cache_bytes(qwen25_7b(), tokens), truth.comm_bw)});
  }
  HardwareProfile start = truth;
  start.comm_bw = 1e9;
  const CalibrationResult fit = calibrate(qwen25_7b(), set, start);
  EXPECT_NEAR(fit.profile.comm_bw / truth.comm_bw, 1.0, 1e-9);
}

TEST(CalibrationSamples, CsvRoundTrip) {
  CalibrationSet set = testing::synth_samples(qwen25_7b(), reference_profile(), 2, 0.05);
  set.transfers.push_back({512, 0.0042});
  const auto path = std::filesystem::temp_directory_path() / "colosim_cal_rt.csv";
  write_calibration_samples(path, set);
  const CalibrationSet back = load_calibration_samples(path);
  ASSERT_EQ(back.iterations.size(), set.iterations.size());
  for (std::size_t i = 0; i < set.iterations.size(); ++i) {
    EXPECT_EQ(back.iterations[i].batch.phase, set.iterations[i].batch.phase);
    EXPECT_EQ(back.iterations[i].batch.lengths, set.iterations[i].batch.lengths);
    EXPECT_EQ(back.iterations[i].observed_s, set.iterations[i].observed_s);
  }
  ASSERT_EQ(back.transfers.size(), 1u);
  EXPECT_EQ(back.transfers[0].tokens, 512u);
  std::filesystem::remove(path);
}

TEST(CalibrationSamples, MalformedRowNamesLine) {
  const auto path = std::filesystem::temp_directory_path() / "colosim_cal_bad.csv";
  {
    std::ofstream out(path);
    out << "phase,batch_size,context_lengths,observed_seconds\n"
        << "decode,2,10;20,0.01\n"
        << "decode,3,10;20,0.01\n";
  }
  try {
    load_calibration_samples(path);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace colosim
