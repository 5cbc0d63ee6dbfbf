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

#include "colosim/scheduler/types.h"

#include <cmath>
#include <string>

#include "colosim/common/errors.h"

namespace colosim {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ConfigError(std::string("metrics.") + field + " must be " + rule);
}

}  // namespace

void SLOConfig::validate() const {
  require(std::isfinite(ttft_slo) && ttft_slo > 0.0, "ttft_slo", "> 0");
  require(std::isfinite(tpot_slo) && tpot_slo > 0.0, "tpot_slo", "> 0");
  require(violation_threshold >= 0.0 && violation_threshold <= 1.0,
          "violation_threshold", "in [0, 1]");
  if (!(slo_margin >= 0.0 && slo_margin < 1.0)) {
    throw ConfigError("scheduler.slo_margin must be in [0, 1)");
  }
}

std::string_view to_string(LengthPreference::Mode mode) {
  switch (mode) {
    case LengthPreference::Mode::kNone: return "none";
    case LengthPreference::Mode::kMaxLenWithin: return "max_len_within";
    case LengthPreference::Mode::kShortest: return "shortest";
  }
  return "?";
}

}  // namespace colosim
