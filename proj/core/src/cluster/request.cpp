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

#include "colosim/cluster/request.h"

#include <stdexcept>
#include <string>

namespace colosim {

std::string_view to_string(RequestState state) {
  switch (state) {
    case RequestState::kQueued: return "queued";
    case RequestState::kPrefilling: return "prefilling";
    case RequestState::kAwaitingTransfer: return "awaiting_transfer";
    case RequestState::kTransferring: return "transferring";
    case RequestState::kDecoding: return "decoding";
    case RequestState::kEvicted: return "evicted";
    case RequestState::kComplete: return "complete";
  }
  return "?";
}

bool is_legal_transition(RequestState from, RequestState to) {
  using S = RequestState;
  switch (from) {
    case S::kQueued:
      return to == S::kPrefilling;
    case S::kPrefilling:
      return to == S::kQueued || to == S::kAwaitingTransfer ||
             to == S::kDecoding || to == S::kComplete;
    case S::kAwaitingTransfer:
      return to == S::kTransferring || to == S::kDecoding;
    case S::kTransferring:
      return to == S::kDecoding;
    case S::kDecoding:
      return to == S::kTransferring || to == S::kEvicted || to == S::kComplete;
    case S::kEvicted:
      return to == S::kPrefilling;
    case S::kComplete:
      return false;
  }
  return false;
}

void Request::transition(RequestState to) {
  if (!is_legal_transition(state, to)) {
    throw std::logic_error("request " + record.id + ": illegal transition " +
                           std::string(to_string(state)) + " -> " +
                           std::string(to_string(to)));
  }
  state = to;
}

}  // namespace colosim
