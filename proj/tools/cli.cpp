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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "colosim/common/errors.h"
#include "colosim/config/manifest.h"
#include "colosim/config/sim_config.h"
#include "colosim/metrics/export.h"
#include "colosim/metrics/request_metrics.h"
#include "colosim/perf_model/calibration.h"
#include "colosim/run.h"
#include "colosim/workload/trace.h"
#include "json.hpp"

namespace colosim::cli {

namespace fs = std::filesystem;

namespace {

struct RunFlags {
  std::string config;
  std::string online_trace;
  std::string offline_trace;
  std::string out;
  std::string policy;
  std::string from_manifest;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  bool verbose_events = false;
};

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

// --seed, then COLOSIM_SEED, then the config file.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("COLOSIM_SEED"); env != nullptr && *env != '\0') {
    return parse_seed(env, "COLOSIM_SEED");
  }
  return config_seed;
}

std::string absolute_or_empty(const std::string& p) {
  return p.empty() ? std::string() : fs::absolute(p).lexically_normal().string();
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("--out: cannot create directory " + dir.string());
  }
}

void check_digest(const std::string& path, const std::string& expected) {
  if (path.empty()) return;
  const std::string got = file_digest(path);
  if (got != expected) {
    throw ConfigError("manifest: " + path + " changed since the recorded run (" + got +
                      " != " + expected + ")");
  }
}

// Config plus provenance for simulate and sweep.
struct Resolved {
  SimConfig config;
  RunManifest manifest;
};

Resolved resolve(const RunFlags& f, const std::string& command) {
  Resolved r;
  RunManifest& m = r.manifest;
  if (!f.from_manifest.empty()) {
    const RunManifest old = load_manifest(f.from_manifest);
    if (old.command != command) {
      throw ConfigError("manifest: recorded command is '" + old.command + "', not '" +
                        command + "'");
    }
    check_digest(old.online_trace, old.online_digest);
    check_digest(old.offline_trace, old.offline_digest);
    r.config = parse_sim_config(old.config_json, fs::path(f.from_manifest).parent_path());
    m = old;
    m.outputs.clear();
    m.tool_version = std::string(tool_version());
    return r;
  }
  r.config = f.config.empty() ? default_sim_config() : load_sim_config(f.config);
  if (!f.policy.empty()) r.config.scheduler.policy = f.policy;
  r.config.seed = resolve_seed(f.seed, r.config.seed);
  r.config.validate();
  m.tool_version = std::string(tool_version());
  m.command = command;
  m.seed = r.config.seed;
  m.policy = r.config.scheduler.policy;
  m.online_trace = absolute_or_empty(f.online_trace);
  m.offline_trace = absolute_or_empty(f.offline_trace);
  if (m.online_trace.empty()) throw ConfigError("--online-trace is required");
  m.online_digest = file_digest(m.online_trace);
  if (!m.offline_trace.empty()) m.offline_digest = file_digest(m.offline_trace);
  m.verbose_events = f.verbose_events;
  m.config_json = to_json(r.config);
  return r;
}

int cmd_simulate(const RunFlags& f, std::ostream& out) {
  if (f.out.empty()) throw ConfigError("--out is required");
  Resolved r = resolve(f, "simulate");
  const fs::path dir = f.out;
  prepare_out_dir(dir);
  const Trace online = load_trace(r.manifest.online_trace);
  const Trace offline =
      r.manifest.offline_trace.empty() ? Trace{} : load_trace(r.manifest.offline_trace);

  SimOptions options;
  std::ofstream events;
  if (r.manifest.verbose_events) {
    events.open(dir / "events.jsonl", std::ios::binary);
    if (!events) throw std::runtime_error("cannot write " + (dir / "events.jsonl").string());
    options.event_log = &events;
  }
  const MetricsLog log = run(r.config, online, offline, options);
  events.close();

  const Summary summary = summarize(log, r.config.slo);
  write_requests_csv(dir / "requests.csv", log, r.config.slo);
  write_utilization_csv(dir / "utilization.csv", log);
  write_text_file(dir / "summary.json", summary_json(summary, r.config.slo));
  r.manifest.outputs = {"requests.csv", "utilization.csv", "summary.json"};
  if (r.manifest.verbose_events) r.manifest.outputs.push_back("events.jsonl");
  write_text_file(dir / "manifest.json", manifest_json(r.manifest));

  out << "policy " << r.config.scheduler.policy << ": " << summary.online_requests
      << " online, " << summary.offline_requests << " offline requests\n"
      << "online violation rate " << summary.online_violation_rate << ", offline goodput "
      << summary.offline_goodput << " tok/s\n"
      << "wrote " << dir.string() << "\n";
  if (!log.invariant_violations.empty()) {
    out << log.invariant_violations.size() << " invariant violations, first: "
        << log.invariant_violations.front() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_sweep(const RunFlags& f, std::ostream& out) {
  if (f.out.empty()) throw ConfigError("--out is required");
  Resolved r = resolve(f, "sweep");
  const fs::path dir = f.out;
  prepare_out_dir(dir);
  const Trace online = load_trace(r.manifest.online_trace);
  Trace lengths;
  if (!r.manifest.offline_trace.empty()) {
    lengths = load_trace(r.manifest.offline_trace);
  } else if (!r.config.sweep.offline_lengths.empty()) {
    lengths = load_trace(r.config.sweep.offline_lengths);
  }
  const std::size_t workers =
      f.workers > 0 ? f.workers : std::max(1u, std::thread::hardware_concurrency());
  const SweepResult result = run_sweep(r.config, online, lengths.records, workers);

  write_sweep_csv(dir / "sweep.csv", result);
  nlohmann::ordered_json j;
  j["policy"] = r.config.scheduler.policy;
  j["max_effective_offline_qps"] = result.max_effective_offline_qps;
  j["violation_threshold"] = r.config.slo.violation_threshold;
  j["points"] = result.points.size();
  write_text_file(dir / "sweep_summary.json", j.dump(2) + "\n");
  r.manifest.outputs = {"sweep.csv", "sweep_summary.json"};
  write_text_file(dir / "manifest.json", manifest_json(r.manifest));

  out << "policy " << r.config.scheduler.policy << ": max effective offline qps "
      << result.max_effective_offline_qps << " over " << result.points.size()
      << " points\nwrote " << dir.string() << "\n";
  return kExitOk;
}

struct CalibrateFlags {
  std::string samples;
  std::string out;
  std::string config;
  std::string model;
};

int cmd_calibrate(const CalibrateFlags& f, std::ostream& out) {
  SimConfig config = f.config.empty() ? default_sim_config() : load_sim_config(f.config);
  const ModelSpec model = f.model.empty() ? config.cluster.model : model_preset(f.model);
  const CalibrationSet samples = load_calibration_samples(f.samples);
  const CalibrationResult result =
      calibrate(model, samples, config.cluster.instances.front().hw);
  write_text_file(f.out, profile_to_json(result.profile));
  out << "fitted " << samples.iterations.size() << " iteration and "
      << samples.transfers.size() << " transfer samples, mean relative error "
      << result.mean_relative_error << "\nwrote " << f.out << "\n";
  return kExitOk;
}

struct ScaleFlags {
  std::string in;
  std::string out;
  std::string mode;
  std::optional<double> ratio;
  std::optional<double> factor;
  std::optional<std::uint64_t> seed;
  std::string histogram;
  double bucket_s = 60.0;
};

int cmd_scale_trace(const ScaleFlags& f, std::ostream& out) {
  const Trace in = load_trace(f.in);
  const std::uint64_t seed = resolve_seed(f.seed, 0);
  Trace scaled;
  if (f.mode == "down") {
    if (!f.ratio) throw ConfigError("--ratio is required with --mode down");
    if (!(*f.ratio >= 0.0 && *f.ratio <= 1.0)) throw ConfigError("--ratio must be in [0, 1]");
    scaled = scale_down(in, *f.ratio, seed);
  } else {
    if (!f.factor) throw ConfigError("--factor is required with --mode up");
    if (!(*f.factor >= 1.0)) throw ConfigError("--factor must be >= 1");
    scaled = scale_up(in, *f.factor, seed);
  }
  write_trace(f.out, scaled);
  if (!f.histogram.empty()) {
    if (!(f.bucket_s > 0.0)) throw ConfigError("--bucket-s must be > 0");
    write_histogram_csv(f.histogram, rate_histogram(scaled, f.bucket_s), f.bucket_s);
  }
  out << in.size() << " -> " << scaled.size() << " records\nwrote " << f.out << "\n";
  return kExitOk;
}

struct ReportFlags {
  bool config_reference = false;
  std::string run_dir;
  std::string out;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(p.string() + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string run_report(const fs::path& dir) {
  std::ostringstream out;
  const RunManifest m = load_manifest(dir / "manifest.json");
  out << "# " << m.command << " run\n\n"
      << "- tool version: " << m.tool_version << "\n"
      << "- policy: " << m.policy << "\n"
      << "- seed: " << m.seed << "\n"
      << "- online trace: " << m.online_trace << " (" << m.online_digest << ")\n";
  if (!m.offline_trace.empty()) {
    out << "- offline trace: " << m.offline_trace << " (" << m.offline_digest << ")\n";
  }
  if (fs::exists(dir / "summary.json")) {
    const auto j = nlohmann::ordered_json::parse(read_file(dir / "summary.json"));
    out << "\n| metric | value |\n|---|---|\n";
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [k2, v2] : value.items()) {
          out << "| " << key << "." << k2 << " | " << v2.dump() << " |\n";
        }
      } else {
        out << "| " << key << " | " << value.dump() << " |\n";
      }
    }
  }
  if (fs::exists(dir / "sweep.csv")) {
    std::istringstream csv(read_file(dir / "sweep.csv"));
    std::string line;
    std::getline(csv, line);
    out << "\n| offline qps | violation rate | offline goodput | completion | pass |"
           " invariant violations |\n"
        << "|---|---|---|---|---|---|\n";
    while (std::getline(csv, line)) {
      std::string cell;
      std::istringstream row(line);
      out << "|";
      while (std::getline(row, cell, ',')) out << " " << cell << " |";
      out << "\n";
    }
  }
  if (fs::exists(dir / "sweep_summary.json")) {
    const auto j = nlohmann::json::parse(read_file(dir / "sweep_summary.json"));
    out << "\nmax effective offline qps: " << j["max_effective_offline_qps"].dump() << "\n";
  }
  return out.str();
}

int cmd_report(const ReportFlags& f, std::ostream& out) {
  std::string text;
  if (f.config_reference) text += config_reference_markdown();
  if (!f.run_dir.empty()) {
    if (!text.empty()) text += "\n";
    text += run_report(f.run_dir);
  }
  if (text.empty()) throw ConfigError("report needs --config-reference or --run-dir");
  if (f.out.empty()) {
    out << text;
  } else {
    write_text_file(f.out, text);
  }
  return kExitOk;
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool sweep) {
  cmd->add_option("--config", f.config, "Config file (JSON)");
  cmd->add_option("--online-trace", f.online_trace, "Online trace (CSV or JSONL)");
  cmd->add_option("--offline-trace", f.offline_trace,
                  sweep ? "Trace supplying offline lengths" : "Offline trace");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Seed (falls back to COLOSIM_SEED, then the config)");
  cmd->add_option("--policy", f.policy, "Policy override: ooco, base_pd or online_priority");
  cmd->add_option("--from-manifest", f.from_manifest, "Rerun from a recorded manifest.json")
      ->excludes("--config", "--online-trace", "--offline-trace", "--seed", "--policy");
  if (sweep) {
    cmd->add_option("--workers", f.workers, "Parallel sweep workers (default: all cores)");
  } else {
    cmd->add_flag("--verbose-events", f.verbose_events, "Also write events.jsonl");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Discrete-event simulator for co-located online/offline LLM serving",
               "colosim");
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  RunFlags sim_flags, sweep_flags;
  add_run_flags(app.add_subcommand("simulate", "Run one simulation"), sim_flags, false);
  add_run_flags(app.add_subcommand("sweep", "Search the max effective offline QPS"),
                sweep_flags, true);

  CalibrateFlags cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit a hardware profile to samples");
  cal_cmd->add_option("--samples", cal.samples, "Samples CSV")->required();
  cal_cmd->add_option("--out", cal.out, "Profile JSON to write")->required();
  cal_cmd->add_option("--config", cal.config, "Config supplying the model and defaults");
  cal_cmd->add_option("--model", cal.model, "Model preset override");

  ScaleFlags sc;
  auto* sc_cmd = app.add_subcommand("scale-trace", "Thin or replicate a trace");
  sc_cmd->add_option("--in", sc.in, "Input trace")->required();
  sc_cmd->add_option("--out", sc.out, "Output trace")->required();
  sc_cmd->add_option("--mode", sc.mode, "down or up")
      ->required()
      ->check(CLI::IsMember({"down", "up"}));
  sc_cmd->add_option("--ratio", sc.ratio, "Keep probability for --mode down");
  sc_cmd->add_option("--factor", sc.factor, "Rate multiplier for --mode up");
  sc_cmd->add_option("--seed", sc.seed, "Seed (falls back to COLOSIM_SEED, then 0)");
  sc_cmd->add_option("--histogram", sc.histogram, "Also write a per-bucket rate CSV");
  sc_cmd->add_option("--bucket-s", sc.bucket_s, "Histogram bucket width in seconds");

  ReportFlags rep;
  auto* rep_cmd = app.add_subcommand("report", "Summarize a run or print the config reference");
  rep_cmd->add_flag("--config-reference", rep.config_reference,
                    "Print every config key with its default");
  rep_cmd->add_option("--run-dir", rep.run_dir, "Output directory of simulate or sweep");
  rep_cmd->add_option("--out", rep.out, "Write the report here instead of stdout");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_flags, out);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_flags, out);
    if (app.got_subcommand("calibrate")) return cmd_calibrate(cal, out);
    if (app.got_subcommand("scale-trace")) return cmd_scale_trace(sc, out);
    return cmd_report(rep, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleScenario& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace colosim::cli
