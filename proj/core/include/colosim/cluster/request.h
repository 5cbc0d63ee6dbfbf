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
#include <string_view>
#include <vector>

#include "colosim/workload/trace.h"

namespace colosim {

// Queued also covers a Prefill halted by preemption (layers_done > 0).
// Transferring is a KV copy between instances, either the push after
// Prefill or a pull migration.
enum class RequestState {
  kQueued,
  kPrefilling,
  kAwaitingTransfer,
  kTransferring,
  kDecoding,
  kEvicted,
  kComplete,
};

std::string_view to_string(RequestState state);

bool is_legal_transition(RequestState from, RequestState to);

struct Request {
  std::uint32_t index = 0;  // position in the merged arrival order
  TraceRecord record;
  RequestState state = RequestState::kQueued;

  int instance = -1;      // where the KV (or queue slot) lives
  int destination = -1;   // transfer target while Transferring
  std::uint64_t kv_tokens = 0;
  // Tokens held back on `instance` for future growth on top of kv_tokens
  // (or, while Transferring, held on `destination`).
  std::uint64_t reserved_tokens = 0;

  std::uint32_t layers_done = 0;     // progress of the current Prefill
  std::uint64_t prefill_tokens = 0;  // length of the current Prefill
  std::uint32_t tokens_emitted = 0;
  bool pending_migration = false;    // leave after the running step
  bool token_pending = false;        // Prefill token not yet delivered
  std::uint64_t transfer_reserve = 0;

  double first_token_ts = -1.0;
  double last_token_ts = -1.0;
  double max_token_gap = 0.0;
  double completion_ts = -1.0;
  std::vector<double> emit_ts;
  std::uint32_t evictions = 0;
  std::uint32_t migrations = 0;
  std::uint32_t preemptions = 0;

  bool online() const { return record.cls == RequestClass::kOnline; }
  // KV tokens once every output token has been produced.
  std::uint64_t final_context() const {
    return std::uint64_t{record.prompt_len} + record.output_len - 1;
  }
  std::uint64_t remaining_tokens() const {
    return record.output_len - tokens_emitted;
  }

  // Throws std::logic_error on an edge outside the lifecycle graph.
  void transition(RequestState to);
};

}  // namespace colosim
