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

#include "colosim/cluster/instance.h"

#include <algorithm>
#include <stdexcept>

namespace colosim {

std::string_view to_string(InstanceKind kind) {
  return kind == InstanceKind::kLatencyRelaxed ? "relaxed" : "strict";
}

void Instance::add_decoding(std::uint32_t request) {
  const auto it = std::lower_bound(decoding.begin(), decoding.end(), request);
  if (it != decoding.end() && *it == request) {
    throw std::logic_error("request already decoding on instance");
  }
  decoding.insert(it, request);
}

void Instance::remove_decoding(std::uint32_t request) {
  const auto it = std::lower_bound(decoding.begin(), decoding.end(), request);
  if (it == decoding.end() || *it != request) {
    throw std::logic_error("request not decoding on instance");
  }
  decoding.erase(it);
}

bool Instance::has_decoding(std::uint32_t request) const {
  return std::binary_search(decoding.begin(), decoding.end(), request);
}

}  // namespace colosim
