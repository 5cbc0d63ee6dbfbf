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

#include "colosim/config/sim_config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "colosim/common/errors.h"
#include "colosim/perf_model/presets.h"
#include "json.hpp"

namespace colosim {

namespace {

using json = nlohmann::ordered_json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key) + ": expected a finite number");
    return d;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) {
        return static_cast<std::uint64_t>(d);
      }
    }
    throw ConfigError(field(key) + ": expected a non-negative integer");
  }
  std::string text(const std::string& key, std::string fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    if (!take(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(field(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }
  }

 private:
  bool take(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const std::vector<std::pair<std::string, ModelSpec (*)()>>& model_presets() {
  static const std::vector<std::pair<std::string, ModelSpec (*)()>> presets = {
      {"qwen2.5-7b", &qwen25_7b}, {"qwen2.5-72b-tp4", &qwen25_72b_tp4}};
  return presets;
}

ModelSpec preset_or_throw(const std::string& name, const std::string& field) {
  for (const auto& [n, make] : model_presets()) {
    if (n == name) return make();
  }
  std::string names;
  for (const auto& p : model_presets()) names += (names.empty() ? "" : ", ") + p.first;
  throw ConfigError(field + ": unknown model preset '" + name + "' (expected " +
                    names + ")");
}

HardwareProfile hardware_preset(const std::string& name, const std::string& field) {
  if (name == "reference") return reference_profile();
  throw ConfigError(field + ": unknown hardware preset '" + name +
                    "' (expected reference)");
}

ModelSpec parse_model(const json& j, const std::string& path) {
  if (j.is_string()) return preset_or_throw(j.get<std::string>(), path);
  Section s(j, path);
  ModelSpec m = preset_or_throw(s.text("preset", "qwen2.5-7b"), s.field("preset"));
  m.num_layers = s.count("num_layers", m.num_layers);
  m.hidden_dim = s.count("hidden_dim", m.hidden_dim);
  m.num_q_heads = s.count("num_q_heads", m.num_q_heads);
  m.num_kv_heads = s.count("num_kv_heads", m.num_kv_heads);
  m.head_dim = s.count("head_dim", m.head_dim);
  m.mlp_intermediate_dim = s.count("mlp_intermediate_dim", m.mlp_intermediate_dim);
  m.vocab_dim = s.count("vocab_dim", m.vocab_dim);
  m.bytes_per_value = s.count("bytes_per_value", m.bytes_per_value);
  m.tp_degree = s.count("tp_degree", m.tp_degree);
  s.finish();
  return m;
}

HardwareProfile parse_hardware(const json& j, const std::string& path,
                               HardwareProfile base,
                               const std::filesystem::path& base_dir) {
  if (j.is_string()) return hardware_preset(j.get<std::string>(), path);
  Section s(j, path);
  if (s.has("preset")) base = hardware_preset(s.text("preset", ""), s.field("preset"));
  if (s.has("profile_file")) {
    std::filesystem::path p = s.text("profile_file", "");
    if (p.is_relative()) p = base_dir / p;
    base = load_profile(p);
  }
  HardwareProfile hw = base;
  hw.gemm_flops = s.number("gemm_flops", hw.gemm_flops);
  hw.prefill_attn_flops = s.number("prefill_attn_flops", hw.prefill_attn_flops);
  hw.decode_attn_flops = s.number("decode_attn_flops", hw.decode_attn_flops);
  hw.gemm_bw = s.number("gemm_bw", hw.gemm_bw);
  hw.attn_bw = s.number("attn_bw", hw.attn_bw);
  hw.prefill_overhead_s = s.number("prefill_overhead_s", hw.prefill_overhead_s);
  hw.decode_overhead_s = s.number("decode_overhead_s", hw.decode_overhead_s);
  hw.comm_bw = s.number("comm_bw", hw.comm_bw);
  hw.kv_capacity_bytes = s.count("kv_capacity_bytes", hw.kv_capacity_bytes);
  s.finish();
  try {
    hw.validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const std::string prefix = "hardware.";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw ConfigError(path + "." + msg);
  }
  return hw;
}

json model_json(const ModelSpec& m) {
  json j;
  j["num_layers"] = m.num_layers;
  j["hidden_dim"] = m.hidden_dim;
  j["num_q_heads"] = m.num_q_heads;
  j["num_kv_heads"] = m.num_kv_heads;
  j["head_dim"] = m.head_dim;
  j["mlp_intermediate_dim"] = m.mlp_intermediate_dim;
  j["vocab_dim"] = m.vocab_dim;
  j["bytes_per_value"] = m.bytes_per_value;
  j["tp_degree"] = m.tp_degree;
  return j;
}

json hardware_json(const HardwareProfile& hw) {
  json j;
  j["gemm_flops"] = hw.gemm_flops;
  j["prefill_attn_flops"] = hw.prefill_attn_flops;
  j["decode_attn_flops"] = hw.decode_attn_flops;
  j["gemm_bw"] = hw.gemm_bw;
  j["attn_bw"] = hw.attn_bw;
  j["prefill_overhead_s"] = hw.prefill_overhead_s;
  j["decode_overhead_s"] = hw.decode_overhead_s;
  j["comm_bw"] = hw.comm_bw;
  j["kv_capacity_bytes"] = hw.kv_capacity_bytes;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_text(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": invalid JSON: " + e.what());
  }
}

OverloadMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "best_effort") return OverloadMode::kBestEffort;
  if (s == "sacrifice") return OverloadMode::kSacrifice;
  throw ConfigError(field + ": unknown mode '" + s +
                    "' (expected best_effort or sacrifice)");
}

const InstanceSpec* first_of(const ClusterConfig& c, InstanceKind kind) {
  for (const InstanceSpec& i : c.instances) {
    if (i.kind == kind) return &i;
  }
  return nullptr;
}

std::size_t count_of(const ClusterConfig& c, InstanceKind kind) {
  std::size_t n = 0;
  for (const InstanceSpec& i : c.instances) n += i.kind == kind ? 1 : 0;
  return n;
}

}  // namespace

std::vector<double> SweepConfig::grid() const {
  if (!qps_grid.empty()) return qps_grid;
  std::vector<double> out;
  if (grid_points == 0 || !(qps_max > 0.0)) return out;
  for (std::size_t k = 1; k <= grid_points; ++k) {
    out.push_back(qps_max * static_cast<double>(k) / static_cast<double>(grid_points));
  }
  return out;
}

void SimConfig::validate() const {
  cluster.validate();
  scheduler.validate();
  slo.validate();
  for (double q : sweep.qps_grid) {
    if (!(q >= 0.0)) throw ConfigError("sweep.qps_grid: values must be >= 0");
  }
  if (!(sweep.qps_max >= 0.0)) throw ConfigError("sweep.qps_max must be >= 0");
  if (sweep.bisection_steps < 0 || sweep.bisection_steps > 60) {
    throw ConfigError("sweep.bisection_steps must be in [0, 60]");
  }
  if (!(sweep.min_offline_completion >= 0.0 && sweep.min_offline_completion <= 1.0)) {
    throw ConfigError("sweep.min_offline_completion must be in [0, 1]");
  }
  if (!(sweep.offline_span_s >= 0.0)) throw ConfigError("sweep.offline_span_s must be >= 0");
}

SimConfig default_sim_config() {
  SimConfig c;
  c.cluster.model = qwen25_7b();
  c.cluster.instances = {{InstanceKind::kLatencyRelaxed, reference_profile()},
                         {InstanceKind::kLatencyStrict, reference_profile()}};
  return c;
}

std::vector<std::string> model_preset_names() {
  std::vector<std::string> out;
  for (const auto& p : model_presets()) out.push_back(p.first);
  return out;
}

ModelSpec model_preset(const std::string& name) { return preset_or_throw(name, "model"); }

SimConfig parse_sim_config(std::string_view json_text,
                           const std::filesystem::path& base_dir) {
  const json root = parse_text(json_text, "config");
  Section top(root, "");
  SimConfig c = default_sim_config();
  c.seed = top.count("seed", 0);

  HardwareProfile hw = reference_profile();
  if (top.has("perf_model")) {
    Section pm(top.raw("perf_model"), "perf_model");
    if (pm.has("model")) {
      c.cluster.model = parse_model(pm.raw("model"), "perf_model.model");
      try {
        c.cluster.model.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("perf_model.") + e.what());
      }
    }
    if (pm.has("hardware")) {
      hw = parse_hardware(pm.raw("hardware"), "perf_model.hardware", hw, base_dir);
    }
    c.scheduler.capacity_threshold =
        pm.number("capacity_threshold", c.scheduler.capacity_threshold);
    pm.finish();
  }

  std::uint64_t relaxed = 1, strict = 1;
  HardwareProfile relaxed_hw = hw, strict_hw = hw;
  if (top.has("cluster")) {
    Section cl(top.raw("cluster"), "cluster");
    relaxed = cl.count("relaxed_instances", relaxed);
    strict = cl.count("strict_instances", strict);
    if (cl.has("relaxed_hardware")) {
      relaxed_hw = parse_hardware(cl.raw("relaxed_hardware"), "cluster.relaxed_hardware",
                                  hw, base_dir);
    }
    if (cl.has("strict_hardware")) {
      strict_hw = parse_hardware(cl.raw("strict_hardware"), "cluster.strict_hardware",
                                 hw, base_dir);
    }
    c.cluster.transfer_bw = cl.number("transfer_bw", c.cluster.transfer_bw);
    c.cluster.drain_s = cl.number("drain_s", c.cluster.drain_s);
    c.cluster.utilization_interval_s =
        cl.number("utilization_interval_s", c.cluster.utilization_interval_s);
    cl.finish();
  }
  if (relaxed < 1) throw ConfigError("cluster.relaxed_instances must be >= 1");
  if (strict < 1) throw ConfigError("cluster.strict_instances must be >= 1");
  if (relaxed + strict > 4096) throw ConfigError("cluster: more than 4096 instances");
  c.cluster.instances.clear();
  for (std::uint64_t k = 0; k < relaxed; ++k) {
    c.cluster.instances.push_back({InstanceKind::kLatencyRelaxed, relaxed_hw});
  }
  for (std::uint64_t k = 0; k < strict; ++k) {
    c.cluster.instances.push_back({InstanceKind::kLatencyStrict, strict_hw});
  }

  if (top.has("scheduler")) {
    Section sc(top.raw("scheduler"), "scheduler");
    c.scheduler.policy = sc.text("policy", c.scheduler.policy);
    c.scheduler.k_random = sc.count("k_random", c.scheduler.k_random);
    c.slo.slo_margin = sc.number("slo_margin", c.slo.slo_margin);
    c.scheduler.decode_cap = sc.count("decode_cap", c.scheduler.decode_cap);
    c.scheduler.gating_window_s = sc.number("gating_window_s", c.scheduler.gating_window_s);
    c.scheduler.spike_window_s = sc.number("spike_window_s", c.scheduler.spike_window_s);
    c.scheduler.spike_factor = sc.number("spike_factor", c.scheduler.spike_factor);
    if (sc.has("selection_mode")) {
      c.scheduler.overload_mode =
          parse_mode(sc.text("selection_mode", ""), "scheduler.selection_mode");
    }
    sc.finish();
  }

  if (top.has("metrics")) {
    Section m(top.raw("metrics"), "metrics");
    c.slo.ttft_slo = m.number("ttft_slo", c.slo.ttft_slo);
    c.slo.tpot_slo = m.number("tpot_slo", c.slo.tpot_slo);
    c.slo.violation_threshold = m.number("violation_threshold", c.slo.violation_threshold);
    c.sweep.min_offline_completion =
        m.number("min_offline_completion", c.sweep.min_offline_completion);
    m.finish();
  }

  if (top.has("sweep")) {
    Section sw(top.raw("sweep"), "sweep");
    c.sweep.qps_grid = sw.numbers("qps_grid");
    c.sweep.qps_max = sw.number("qps_max", c.sweep.qps_max);
    c.sweep.grid_points = sw.count("grid_points", c.sweep.grid_points);
    const std::uint64_t steps = sw.count("bisection_steps", 4);
    if (steps > 60) throw ConfigError("sweep.bisection_steps must be in [0, 60]");
    c.sweep.bisection_steps = static_cast<int>(steps);
    const std::string lengths = sw.text("offline_lengths", "");
    if (!lengths.empty()) {
      std::filesystem::path p = lengths;
      if (p.is_relative()) p = base_dir / p;
      c.sweep.offline_lengths = p.lexically_normal();
    }
    c.sweep.offline_span_s = sw.number("offline_span_s", c.sweep.offline_span_s);
    sw.finish();
  }
  top.finish();
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_sim_config(text, std::filesystem::absolute(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_json(const SimConfig& c) {
  json j;
  j["seed"] = c.seed;
  const InstanceSpec* relaxed = first_of(c.cluster, InstanceKind::kLatencyRelaxed);
  const InstanceSpec* strict = first_of(c.cluster, InstanceKind::kLatencyStrict);
  const HardwareProfile base = relaxed ? relaxed->hw : reference_profile();
  j["perf_model"]["model"] = model_json(c.cluster.model);
  j["perf_model"]["hardware"] = hardware_json(base);
  j["perf_model"]["capacity_threshold"] = c.scheduler.capacity_threshold;
  auto& cl = j["cluster"];
  cl["relaxed_instances"] = count_of(c.cluster, InstanceKind::kLatencyRelaxed);
  cl["strict_instances"] = count_of(c.cluster, InstanceKind::kLatencyStrict);
  cl["relaxed_hardware"] = hardware_json(base);
  cl["strict_hardware"] = hardware_json(strict ? strict->hw : base);
  cl["transfer_bw"] = c.cluster.transfer_bw;
  cl["drain_s"] = c.cluster.drain_s;
  cl["utilization_interval_s"] = c.cluster.utilization_interval_s;
  auto& sc = j["scheduler"];
  sc["policy"] = c.scheduler.policy;
  sc["k_random"] = c.scheduler.k_random;
  sc["slo_margin"] = c.slo.slo_margin;
  sc["decode_cap"] = c.scheduler.decode_cap;
  sc["gating_window_s"] = c.scheduler.gating_window_s;
  sc["spike_window_s"] = c.scheduler.spike_window_s;
  sc["spike_factor"] = c.scheduler.spike_factor;
  sc["selection_mode"] = c.scheduler.overload_mode == OverloadMode::kSacrifice
                             ? "sacrifice"
                             : "best_effort";
  auto& m = j["metrics"];
  m["ttft_slo"] = c.slo.ttft_slo;
  m["tpot_slo"] = c.slo.tpot_slo;
  m["violation_threshold"] = c.slo.violation_threshold;
  m["min_offline_completion"] = c.sweep.min_offline_completion;
  auto& sw = j["sweep"];
  sw["qps_grid"] = c.sweep.qps_grid;
  sw["qps_max"] = c.sweep.qps_max;
  sw["grid_points"] = c.sweep.grid_points;
  sw["bisection_steps"] = c.sweep.bisection_steps;
  sw["offline_lengths"] = c.sweep.offline_lengths.string();
  sw["offline_span_s"] = c.sweep.offline_span_s;
  return j.dump(2) + "\n";
}

std::string profile_to_json(const HardwareProfile& hw) {
  return hardware_json(hw).dump(2) + "\n";
}

HardwareProfile load_profile(const std::filesystem::path& path) {
  const json j = parse_text(read_file(path), path.string());
  if (j.is_object() && (j.contains("preset") || j.contains("profile_file"))) {
    throw ConfigError(path.string() + ": profile files hold plain hardware fields");
  }
  return parse_hardware(j, path.string(), reference_profile(), path.parent_path());
}

std::string config_reference_markdown() {
  struct Entry {
    const char* key;
    const char* fallback;  // shown instead of the snapshot value
    const char* doc;
  };
  static const Entry entries[] = {
      {"seed", nullptr, "Seed for every random choice in the run (COLOSIM_SEED and --seed override it)."},
      {"perf_model.model", "\"qwen2.5-7b\"", "Model preset name (qwen2.5-7b, qwen2.5-72b-tp4) or an object with `preset` plus any of num_layers, hidden_dim, num_q_heads, num_kv_heads, head_dim, mlp_intermediate_dim, vocab_dim, bytes_per_value, tp_degree."},
      {"perf_model.hardware", "\"reference\"", "Hardware preset name or an object with optional `preset`, `profile_file` (output of `colosim calibrate`) and field overrides."},
      {"perf_model.capacity_threshold", nullptr, "KV occupancy fraction above which a batch counts as capacity bound."},
      {"cluster.relaxed_instances", nullptr, "Number of latency-relaxed instances (Prefill and offline Decode)."},
      {"cluster.strict_instances", nullptr, "Number of latency-strict instances (Decode under the TPOT bound)."},
      {"cluster.relaxed_hardware", "perf_model.hardware", "Per-kind hardware override, same schema as perf_model.hardware."},
      {"cluster.strict_hardware", "perf_model.hardware", "Per-kind hardware override, same schema as perf_model.hardware."},
      {"cluster.transfer_bw", nullptr, "KV transfer bandwidth in bytes/s; 0 uses the source's comm_bw."},
      {"cluster.drain_s", nullptr, "Simulated seconds after the last arrival before the run stops."},
      {"cluster.utilization_interval_s", nullptr, "Sampling period of the utilization series."},
      {"scheduler.policy", nullptr, "ooco, base_pd or online_priority."},
      {"scheduler.k_random", nullptr, "Random offline candidates tested per mixed Decode batch."},
      {"scheduler.slo_margin", nullptr, "Fraction of the TPOT bound kept free before strict instances pull offline work."},
      {"scheduler.decode_cap", nullptr, "online_priority Decode batch cap; 0 derives it from the median context."},
      {"scheduler.gating_window_s", nullptr, "Window of the preemption/eviction rate used by offline admission."},
      {"scheduler.spike_window_s", nullptr, "online_priority spike detector window."},
      {"scheduler.spike_factor", nullptr, "Spike when the windowed online rate exceeds this multiple of the long-run rate."},
      {"scheduler.selection_mode", nullptr, "best_effort or sacrifice, for online batches that alone exceed the TPOT bound."},
      {"metrics.ttft_slo", nullptr, "TTFT bound in seconds."},
      {"metrics.tpot_slo", nullptr, "TPOT bound in seconds (mean inter-token gap per request)."},
      {"metrics.violation_threshold", nullptr, "Largest acceptable online violation rate."},
      {"metrics.min_offline_completion", nullptr, "Fraction of offline arrivals that must complete for a sweep point to count as sustained."},
      {"sweep.qps_grid", nullptr, "Explicit offline QPS grid; 0 is always added."},
      {"sweep.qps_max", nullptr, "Upper end of the even grid used when qps_grid is empty."},
      {"sweep.grid_points", nullptr, "Points of the even grid."},
      {"sweep.bisection_steps", nullptr, "Refinement steps between the last passing and first failing grid point."},
      {"sweep.offline_lengths", "\"\"", "Trace whose prompt/output lengths the uniform offline stream cycles (relative to the config file)."},
      {"sweep.offline_span_s", nullptr, "Length of the offline stream; 0 follows the online trace."},
  };
  const json defaults = json::parse(to_json(default_sim_config()));
  std::string out =
      "# colosim configuration reference\n\n"
      "Generated by `colosim report --config-reference`. Every key is optional;\n"
      "unknown keys are rejected with the dotted field name.\n\n"
      "| key | default | meaning |\n|---|---|---|\n";
  for (const Entry& e : entries) {
    std::string value;
    if (e.fallback) {
      value = e.fallback;
    } else {
      const json* node = &defaults;
      std::string key = e.key;
      std::size_t start = 0;
      while (true) {
        const std::size_t dot = key.find('.', start);
        node = &node->at(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      value = node->dump();
    }
    out += "| `" + std::string(e.key) + "` | `" + value + "` | " + e.doc + " |\n";
  }
  return out;
}

}  // namespace colosim
