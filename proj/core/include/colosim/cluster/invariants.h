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
#include <span>
#include <string>
#include <vector>

#include "colosim/cluster/instance.h"
#include "colosim/cluster/request.h"

namespace colosim {

// Observes the engine and records every breach of the lifecycle
// invariants. Messages beyond kMaxMessages are only counted.
class InvariantMonitor {
 public:
  static constexpr std::size_t kMaxMessages = 64;

  void reset(std::size_t num_requests);

  void check_capacity(double now, std::span<const Instance> instances);
  void on_prefill_start(double now, const Instance& inst, const Request& r);
  void on_decode_start(double now, const Instance& inst,
                       std::span<const std::uint32_t> batch,
                       std::span<const Request> requests);
  void on_preemption(double now, double delay, double layer_latency);
  void on_prefill_done(const Request& r);
  void on_eviction(const Request& r);
  void on_complete(double now, const Request& r);

  std::uint64_t violation_count() const { return count_; }
  const std::vector<std::string>& messages() const { return messages_; }
  std::uint64_t prefill_tokens() const { return prefill_tokens_; }
  std::uint64_t expected_prefill_tokens() const { return expected_tokens_; }

 private:
  void fail(double now, const std::string& what);

  std::vector<std::uint64_t> processed_;
  std::vector<std::uint64_t> expected_;
  std::uint64_t prefill_tokens_ = 0;
  std::uint64_t expected_tokens_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::string> messages_;
};

}  // namespace colosim
