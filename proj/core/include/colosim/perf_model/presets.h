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

#include "colosim/perf_model/types.h"

namespace colosim {

// Qwen2.5-7B-shaped decoder (GQA 28/4, bf16).
ModelSpec qwen25_7b();

// Qwen2.5-72B-shaped decoder, sharded over four ranks.
ModelSpec qwen25_72b_tp4();

// Synthetic single-chip profile. GEMM rates put the Decode saturation batch
// of qwen25_7b() at 300; attn_bw is an effective rate under the fused
// attention traffic formula.
HardwareProfile reference_profile();

}  // namespace colosim
