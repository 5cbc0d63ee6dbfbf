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

#include "colosim/cluster/invariants.h"

#include <string>

namespace colosim {

void InvariantMonitor::reset(std::size_t num_requests) {
  processed_.assign(num_requests, 0);
  expected_.assign(num_requests, 0);
  prefill_tokens_ = 0;
  expected_tokens_ = 0;
  count_ = 0;
  messages_.clear();
}

void InvariantMonitor::fail(double now, const std::string& what) {
  ++count_;
  if (messages_.size() < kMaxMessages) {
    messages_.push_back("t=" + std::to_string(now) + ": " + what);
  }
}

void InvariantMonitor::check_capacity(double now,
                                      std::span<const Instance> instances) {
  for (const Instance& inst : instances) {
    if (inst.kv_used_bytes() > inst.hw.kv_capacity_bytes) {
      fail(now, "instance " + std::to_string(inst.id) + " holds " +
                    std::to_string(inst.kv_used_bytes()) + " KV bytes over capacity " +
                    std::to_string(inst.hw.kv_capacity_bytes));
    }
    if (inst.kv_used_tokens + inst.kv_reserved_tokens > inst.capacity_tokens()) {
      fail(now, "instance " + std::to_string(inst.id) + " over-reserved");
    }
  }
}

void InvariantMonitor::on_prefill_start(double now, const Instance& inst,
                                        const Request& r) {
  if (!inst.relaxed()) {
    fail(now, "prefill of " + r.record.id + " on strict instance " +
                  std::to_string(inst.id));
  }
}

void InvariantMonitor::on_decode_start(double now, const Instance& inst,
                                       std::span<const std::uint32_t> batch,
                                       std::span<const Request> requests) {
  for (std::uint32_t i : batch) {
    const Request& r = requests[i];
    if (inst.relaxed() && r.online()) {
      fail(now, "online decode of " + r.record.id + " on relaxed instance " +
                    std::to_string(inst.id));
    }
    if (r.state != RequestState::kDecoding || r.instance != inst.id) {
      fail(now, "batch member " + r.record.id + " is not resident");
    }
  }
}

void InvariantMonitor::on_preemption(double now, double delay,
                                     double layer_latency) {
  if (delay < 0.0 || delay > layer_latency * (1.0 + 1e-9)) {
    fail(now, "preemption delay " + std::to_string(delay) +
                  " exceeds layer latency " + std::to_string(layer_latency));
  }
}

void InvariantMonitor::on_prefill_done(const Request& r) {
  processed_[r.index] += r.prefill_tokens;
  prefill_tokens_ += r.prefill_tokens;
  if (expected_[r.index] == 0) {
    expected_[r.index] = r.record.prompt_len;
    expected_tokens_ += r.record.prompt_len;
  }
}

void InvariantMonitor::on_eviction(const Request& r) {
  const std::uint64_t recompute =
      std::uint64_t{r.record.prompt_len} + r.tokens_emitted;
  expected_[r.index] += recompute;
  expected_tokens_ += recompute;
}

void InvariantMonitor::on_complete(double now, const Request& r) {
  if (r.tokens_emitted != r.record.output_len ||
      (!r.emit_ts.empty() && r.emit_ts.size() != r.record.output_len)) {
    fail(now, "request " + r.record.id + " emitted " +
                  std::to_string(r.tokens_emitted) + " of " +
                  std::to_string(r.record.output_len) + " tokens");
  }
  if (processed_[r.index] != expected_[r.index]) {
    fail(now, "request " + r.record.id + " prefilled " +
                  std::to_string(processed_[r.index]) + " tokens, expected " +
                  std::to_string(expected_[r.index]));
  }
  if (r.kv_tokens != 0 || r.reserved_tokens != 0) {
    fail(now, "request " + r.record.id + " completed holding KV");
  }
}

}  // namespace colosim
