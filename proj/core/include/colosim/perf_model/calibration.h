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

#include <filesystem>
#include <string>
#include <vector>

#include "colosim/perf_model/types.h"

namespace colosim {

// One profiled iteration.
struct CalibrationSample {
  BatchDescriptor batch;
  double observed_s = 0.0;
};

// One profiled KV transfer of `tokens` cached tokens.
struct TransferSample {
  std::uint64_t tokens = 0;
  double observed_s = 0.0;
};

struct CalibrationSet {
  std::vector<CalibrationSample> iterations;
  std::vector<TransferSample> transfers;
};

struct CalibrationResult {
  HardwareProfile profile;
  double mean_relative_error = 0.0;  // over the fitted iteration samples
  int evaluations = 0;
};

// CSV with header `phase,batch_size,context_lengths,observed_seconds`.
// phase is prefill, decode or transfer; context_lengths is ';'-separated.
CalibrationSet load_calibration_samples(const std::filesystem::path& path);
void write_calibration_samples(const std::filesystem::path& path,
                               const CalibrationSet& set);

// Fits the seven iteration parameters (and comm_bw when transfer samples
// exist) to minimise mean relative error. Fields not fitted are copied from
// `defaults`. Throws ConfigError naming the unconstrained parameters when
// the sample set cannot pin them down.
CalibrationResult calibrate(const ModelSpec& model,
                            const CalibrationSet& samples,
                            const HardwareProfile& defaults);

double mean_relative_error(const ModelSpec& model, const HardwareProfile& hw,
                           const std::vector<CalibrationSample>& samples);

}  // namespace colosim
