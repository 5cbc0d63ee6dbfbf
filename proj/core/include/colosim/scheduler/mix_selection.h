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
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace colosim {

// A decoding request as the selection algorithms see it.
struct Candidate {
  std::uint32_t id = 0;
  std::uint64_t length = 0;  // context of its next Decode step
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Predicted Decode latency of a batch, in seconds.
using BatchPredictor = std::function<double(std::span<const Candidate>)>;

// What to do when the online requests alone already exceed S.
enum class OverloadMode {
  kBestEffort,  // run them all anyway
  kSacrifice,   // drop the newest online requests until the batch fits
};

// Every online request is kept (unless sacrificed). Up to K random
// offline candidates are tried one by one, then the largest fitting prefix
// of the remaining offline requests, shortest first, is merged.
std::vector<Candidate> mix_decoding_selection(
    std::span<const Candidate> online, std::span<const Candidate> offline,
    double slo_s, const BatchPredictor& predict, std::size_t k_random,
    std::mt19937_64& rng, OverloadMode mode = OverloadMode::kBestEffort);

}  // namespace colosim
