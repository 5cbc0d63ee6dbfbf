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
#include <ostream>
#include <string>

#include "colosim/metrics/metrics_log.h"
#include "colosim/metrics/request_metrics.h"
#include "colosim/metrics/sweep.h"

namespace colosim {

// Shortest round-trip decimal form.
std::string format_double(double v);

void write_requests_csv(std::ostream& out, const MetricsLog& log,
                        const SLOConfig& slo);
void write_utilization_csv(std::ostream& out, const MetricsLog& log);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::string summary_json(const Summary& summary, const SLOConfig& slo);

// Path variants throw std::runtime_error when the file cannot be written.
void write_requests_csv(const std::filesystem::path& path,
                        const MetricsLog& log, const SLOConfig& slo);
void write_utilization_csv(const std::filesystem::path& path,
                           const MetricsLog& log);
void write_sweep_csv(const std::filesystem::path& path,
                     const SweepResult& result);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace colosim
