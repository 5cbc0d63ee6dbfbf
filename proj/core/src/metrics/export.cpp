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

#include "colosim/metrics/export.h"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace colosim {

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_requests_csv(std::ostream& out, const MetricsLog& log,
                        const SLOConfig& slo) {
  out << "id,class,arrival,prompt_len,output_len,first_token_ts,completion_ts,"
         "ttft,tpot,max_token_gap,tokens_emitted,evictions,migrations,"
         "preemptions,violates\n";
  for (const RequestRecord& r : log.requests) {
    out << r.id << ',' << to_string(r.cls) << ',' << format_double(r.arrival) << ','
        << r.prompt_len << ',' << r.output_len << ','
        << (r.first_token_ts >= 0.0 ? format_double(r.first_token_ts) : "") << ','
        << (r.complete() ? format_double(r.completion_ts) : "") << ','
        << opt(ttft(r)) << ',' << opt(tpot(r)) << ','
        << format_double(r.max_token_gap) << ',' << r.tokens_emitted << ','
        << r.evictions << ',' << r.migrations << ',' << r.preemptions << ','
        << (violates(r, slo) ? 1 : 0) << '\n';
  }
}

void write_utilization_csv(std::ostream& out, const MetricsLog& log) {
  out << "t,instance,busy_fraction,kv_occupancy\n";
  for (const UtilizationSample& s : log.utilization) {
    out << format_double(s.t) << ',' << s.instance << ','
        << format_double(s.busy_fraction) << ',' << format_double(s.kv_occupancy)
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "offline_qps,violation_rate,offline_goodput,offline_completion,pass,invariant_violations\n";
  for (const SweepPoint& p : result.points) {
    out << format_double(p.offline_qps) << ',' << format_double(p.violation_rate)
        << ',' << format_double(p.offline_goodput) << ','
        << format_double(p.offline_completion) << ',' << (p.pass ? 1 : 0) << ','
        << p.invariant_violations << '\n';
  }
}

std::string summary_json(const Summary& s, const SLOConfig& slo) {
  nlohmann::ordered_json j;
  j["online_requests"] = s.online_requests;
  j["online_complete"] = s.online_complete;
  j["offline_requests"] = s.offline_requests;
  j["offline_complete"] = s.offline_complete;
  j["online_violation_rate"] = s.online_violation_rate;
  j["violation_threshold"] = slo.violation_threshold;
  j["ttft_slo"] = slo.ttft_slo;
  j["tpot_slo"] = slo.tpot_slo;
  j["ttft_p50"] = s.ttft_p50;
  j["ttft_p99"] = s.ttft_p99;
  j["tpot_mean"] = s.tpot_mean;
  j["tpot_p99"] = s.tpot_p99;
  j["token_gap_p99"] = s.token_gap_p99;
  j["ttft_undefined"] = s.ttft_undefined;
  j["tpot_undefined"] = s.tpot_undefined;
  j["offline_tokens"] = s.offline_tokens;
  j["offline_goodput"] = s.offline_goodput;
  j["horizon_s"] = s.horizon_s;
  j["max_preemption_delay_s"] = s.max_preemption_delay_s;
  j["invariant_violations"] = s.invariant_violations;
  auto& c = j["counts"];
  c["events"] = s.counts.events;
  c["prefills"] = s.counts.prefills;
  c["decode_steps"] = s.counts.decode_steps;
  c["preemptions"] = s.counts.preemptions;
  c["evictions"] = s.counts.evictions;
  c["migrations"] = s.counts.migrations;
  c["transfers"] = s.counts.transfers;
  c["pull_signals"] = s.counts.pull_signals;
  c["prefill_tokens"] = s.counts.prefill_tokens;
  c["recompute_tokens"] = s.counts.recompute_tokens;
  return j.dump(2) + "\n";
}

void write_requests_csv(const std::filesystem::path& path, const MetricsLog& log,
                        const SLOConfig& slo) {
  auto out = open_out(path);
  write_requests_csv(out, log, slo);
}

void write_utilization_csv(const std::filesystem::path& path, const MetricsLog& log) {
  auto out = open_out(path);
  write_utilization_csv(out, log);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  auto out = open_out(path);
  write_sweep_csv(out, result);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace colosim
