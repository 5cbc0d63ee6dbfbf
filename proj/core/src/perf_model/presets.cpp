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

#include "colosim/perf_model/presets.h"

namespace colosim {

ModelSpec qwen25_7b() {
  ModelSpec m;
  m.num_layers = 28;
  m.hidden_dim = 3584;
  m.num_q_heads = 28;
  m.num_kv_heads = 4;
  m.head_dim = 128;
  m.mlp_intermediate_dim = 18944;
  m.vocab_dim = 152064;
  m.bytes_per_value = 2;
  m.tp_degree = 1;
  return m;
}

ModelSpec qwen25_72b_tp4() {
  ModelSpec m;
  m.num_layers = 80;
  m.hidden_dim = 8192;
  m.num_q_heads = 64;
  m.num_kv_heads = 8;
  m.head_dim = 128;
  m.mlp_intermediate_dim = 29568;
  m.vocab_dim = 152064;
  m.bytes_per_value = 2;
  m.tp_degree = 4;
  return m;
}

HardwareProfile reference_profile() {
  HardwareProfile hw;
  hw.gemm_flops = 3.4e14;
  hw.prefill_attn_flops = 2.2e14;
  hw.decode_attn_flops = 8.0e13;
  hw.gemm_bw = 1.25e12;
  hw.attn_bw = 2.0e13;
  hw.prefill_overhead_s = 0.012;
  hw.decode_overhead_s = 0.006;
  hw.comm_bw = 2.5e10;
  hw.kv_capacity_bytes = 32ull << 30;
  return hw;
}

}  // namespace colosim
