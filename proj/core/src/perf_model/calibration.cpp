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

#include "colosim/perf_model/calibration.h"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "colosim/common/errors.h"
#include "colosim/perf_model/roofline.h"

namespace colosim {

namespace {

constexpr int kNumParams = 7;
enum Param {
  kGemmFlops,
  kGemmBw,
  kPrefillAttnFlops,
  kDecodeAttnFlops,
  kAttnBw,
  kPrefillOverhead,
  kDecodeOverhead,
};
constexpr std::array<const char*, kNumParams> kParamNames = {
    "gemm_flops",         "gemm_bw",           "prefill_attn_flops",
    "decode_attn_flops",  "attn_bw",           "prefill_overhead_s",
    "decode_overhead_s"};

bool is_overhead(int p) { return p == kPrefillOverhead || p == kDecodeOverhead; }

struct WeightedOp {
  double flops;
  double bytes;
  double multiplicity;
};

// Attention ops sorted by arithmetic intensity with prefix sums, so the
// roofline sum for any rate pair is one binary search: ops below the ridge
// intensity F/M are memory bound, the rest compute bound.
struct IntensityTable {
  std::vector<double> intensity;
  std::vector<double> flops_prefix{0.0};
  std::vector<double> bytes_prefix{0.0};

  double latency(double f, double m) const {
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(intensity.begin(), intensity.end(), f / m) -
        intensity.begin());
    return bytes_prefix[k] / m + (flops_prefix.back() - flops_prefix[k]) / f;
  }
};

// Operator decomposition of one sample, reusable across parameter guesses.
struct PreparedSample {
  bool prefill = false;
  std::vector<WeightedOp> gemms;
  std::vector<WeightedOp> attention;
  IntensityTable attention_table;
  double comm_s = 0.0;
  double observed_s = 0.0;
};

PreparedSample prepare(const ModelSpec& m, const HardwareProfile& hw,
                       const CalibrationSample& s) {
  PreparedSample p;
  p.prefill = s.batch.phase == Phase::kPrefill;
  p.observed_s = s.observed_s;
  const std::uint64_t rows = s.batch.gemm_rows();
  const std::uint64_t tp = m.tp_degree;
  const std::uint64_t d = m.bytes_per_value;
  const double layers = static_cast<double>(m.num_layers);
  const std::array<std::pair<std::uint64_t, std::uint64_t>, 4> shapes = {{
      {m.hidden_dim, (m.num_q_heads + 2 * m.num_kv_heads) * m.head_dim / tp},
      {m.hidden_dim / tp, m.hidden_dim},
      {m.hidden_dim, 2 * m.mlp_intermediate_dim / tp},
      {m.mlp_intermediate_dim / tp, m.hidden_dim},
  }};
  for (const auto& [din, dout] : shapes) {
    const OpCost c = gemm_cost(rows, din, dout, d);
    p.gemms.push_back({static_cast<double>(c.flops),
                       static_cast<double>(c.bytes), layers});
  }
  const OpCost logits = gemm_cost(rows, m.hidden_dim, m.vocab_dim / tp, d);
  p.gemms.push_back({static_cast<double>(logits.flops),
                     static_cast<double>(logits.bytes), 1.0});
  for (std::uint64_t len : s.batch.lengths) {
    const OpCost c =
        attention_cost(p.prefill ? len : 1, len, m.hidden_dim / tp,
                       m.num_q_heads / tp, m.num_kv_heads / tp, d);
    p.attention.push_back({static_cast<double>(c.flops),
                           static_cast<double>(c.bytes), layers});
  }
  std::vector<WeightedOp> sorted = p.attention;
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedOp& a, const WeightedOp& b) {
              return a.flops * b.bytes < b.flops * a.bytes;
            });
  for (const WeightedOp& op : sorted) {
    p.attention_table.intensity.push_back(op.flops / op.bytes);
    p.attention_table.flops_prefix.push_back(
        p.attention_table.flops_prefix.back() + op.multiplicity * op.flops);
    p.attention_table.bytes_prefix.push_back(
        p.attention_table.bytes_prefix.back() + op.multiplicity * op.bytes);
  }
  if (tp > 1) {
    p.comm_s = 2.0 * layers * comm_latency(d * rows * m.hidden_dim, hw.comm_bw);
  }
  return p;
}

using ParamVec = std::array<double, kNumParams>;

double predict(const PreparedSample& s, const ParamVec& v) {
  double t = s.comm_s;
  for (const WeightedOp& op : s.gemms) {
    t += op.multiplicity *
         std::max(op.flops / v[kGemmFlops], op.bytes / v[kGemmBw]);
  }
  const double attn_flops =
      s.prefill ? v[kPrefillAttnFlops] : v[kDecodeAttnFlops];
  t += s.attention_table.latency(attn_flops, v[kAttnBw]);
  return t + (s.prefill ? v[kPrefillOverhead] : v[kDecodeOverhead]);
}

double objective(const std::vector<PreparedSample>& samples,
                 const ParamVec& v) {
  double sum = 0.0;
  for (const PreparedSample& s : samples) {
    sum += std::abs(predict(s, v) - s.observed_s) / s.observed_s;
  }
  return sum / static_cast<double>(samples.size());
}

ParamVec to_params(const HardwareProfile& hw) {
  return {hw.gemm_flops,         hw.gemm_bw,  hw.prefill_attn_flops,
          hw.decode_attn_flops,  hw.attn_bw,  hw.prefill_overhead_s,
          hw.decode_overhead_s};
}

void apply_params(const ParamVec& v, HardwareProfile& hw) {
  hw.gemm_flops = v[kGemmFlops];
  hw.gemm_bw = v[kGemmBw];
  hw.prefill_attn_flops = v[kPrefillAttnFlops];
  hw.decode_attn_flops = v[kDecodeAttnFlops];
  hw.attn_bw = v[kAttnBw];
  hw.prefill_overhead_s = v[kPrefillOverhead];
  hw.decode_overhead_s = v[kDecodeOverhead];
}

// Linear surrogate where every operator pays both its compute and memory
// time. Its weighted least-squares solution is the starting point.
ParamVec initial_guess(const std::vector<PreparedSample>& samples,
                       const ParamVec& fallback) {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, kNumParams);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PreparedSample& s = samples[static_cast<std::size_t>(i)];
    const double w = 1.0 / s.observed_s;
    for (const WeightedOp& op : s.gemms) {
      a(i, kGemmFlops) += w * op.multiplicity * op.flops;
      a(i, kGemmBw) += w * op.multiplicity * op.bytes;
    }
    for (const WeightedOp& op : s.attention) {
      a(i, s.prefill ? kPrefillAttnFlops : kDecodeAttnFlops) +=
          w * op.multiplicity * op.flops;
      a(i, kAttnBw) += w * op.multiplicity * op.bytes;
    }
    a(i, s.prefill ? kPrefillOverhead : kDecodeOverhead) = w;
    y(i) = w * (s.observed_s - s.comm_s);
  }
  // Column scaling keeps the QR well conditioned across ~15 decades.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < kNumParams; ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
    a.col(j) /= scale(j);
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);

  ParamVec guess = fallback;
  for (int j = 0; j < kNumParams; ++j) {
    const double coef = x(j) / scale(j);
    if (!std::isfinite(coef)) continue;
    if (is_overhead(j)) {
      guess[j] = std::max(0.0, coef);
    } else if (coef > 0.0) {
      guess[j] = 1.0 / coef;  // surrogate coefficients are reciprocal rates
    }
  }
  return guess;
}

// Hooke-Jeeves pattern search: rates move multiplicatively, overheads
// additively (clamped at zero).
class PatternSearch {
 public:
  PatternSearch(const std::vector<PreparedSample>& samples, double o_scale)
      : samples_(samples), o_scale_(o_scale) {}

  ParamVec run(ParamVec x, int& evaluations) {
    double fx = eval(x);
    double step = 0.5;
    while (step > 1e-10 && fx > 0.0 && evaluations_ < kMaxEvaluations) {
      ParamVec x1 = x;
      double f1 = explore(x1, fx, step);
      if (f1 < fx * (1.0 - 1e-12)) {
        for (int guard = 0; guard < 1000; ++guard) {
          ParamVec pattern = x1;
          for (int j = 0; j < kNumParams; ++j) {
            pattern[j] = is_overhead(j)
                             ? std::max(0.0, 2.0 * x1[j] - x[j])
                             : x1[j] * (x1[j] / x[j]);
          }
          double fp = eval(pattern);
          const double f2 = explore(pattern, fp, step);
          x = x1;
          fx = f1;
          if (f2 < f1 * (1.0 - 1e-12)) {
            x1 = pattern;
            f1 = f2;
          } else {
            break;
          }
        }
        x = x1;
        fx = f1;
      } else {
        step *= 0.5;
      }
    }
    evaluations = evaluations_;
    return x;
  }

 private:
  double eval(const ParamVec& v) {
    ++evaluations_;
    return objective(samples_, v);
  }

  ParamVec moved(const ParamVec& v, int j, double step, int sign) const {
    ParamVec out = v;
    if (is_overhead(j)) {
      out[j] = std::max(0.0, v[j] + sign * step * std::max(o_scale_, v[j]));
    } else {
      out[j] = v[j] * std::exp(sign * step);
    }
    return out;
  }

  double explore(ParamVec& x, double fx, double step) {
    for (int j = 0; j < kNumParams; ++j) {
      for (int sign : {+1, -1}) {
        const ParamVec cand = moved(x, j, step, sign);
        const double fc = eval(cand);
        if (fc < fx) {
          x = cand;
          fx = fc;
          break;
        }
      }
    }
    return fx;
  }

  static constexpr int kMaxEvaluations = 400000;

  const std::vector<PreparedSample>& samples_;
  double o_scale_;
  int evaluations_ = 0;
};

// Minimiser of sum |bytes / (bw * observed) - 1| is a weighted median.
double fit_comm_bw(const ModelSpec& model,
                   const std::vector<TransferSample>& transfers) {
  std::vector<std::pair<double, double>> points;  // (1/rate, weight=rate)
  for (const TransferSample& t : transfers) {
    const double bytes = static_cast<double>(kv_cache_bytes(model, t.tokens));
    if (bytes <= 0.0 || t.observed_s <= 0.0) continue;
    const double rate = bytes / t.observed_s;
    points.emplace_back(1.0 / rate, rate);
  }
  if (points.empty()) return 0.0;
  std::sort(points.begin(), points.end());
  double total = 0.0;
  for (const auto& p : points) total += p.second;
  double acc = 0.0;
  for (const auto& [inv_rate, weight] : points) {
    acc += weight;
    if (acc >= 0.5 * total) return 1.0 / inv_rate;
  }
  return 1.0 / points.back().first;
}

void check_determined(const CalibrationSet& set) {
  std::vector<std::string> missing;
  const auto add = [&missing](std::initializer_list<int> params) {
    for (int p : params) {
      const std::string name = kParamNames[static_cast<std::size_t>(p)];
      if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
        missing.push_back(name);
      }
    }
  };
  if (set.iterations.size() < 8) {
    add({kGemmFlops, kGemmBw, kPrefillAttnFlops, kDecodeAttnFlops, kAttnBw,
         kPrefillOverhead, kDecodeOverhead});
  }
  bool any_prefill = false;
  bool any_decode = false;
  std::set<std::uint64_t> batch_sizes;
  for (const CalibrationSample& s : set.iterations) {
    (s.batch.phase == Phase::kPrefill ? any_prefill : any_decode) = true;
    batch_sizes.insert(s.batch.gemm_rows());
  }
  if (!any_prefill) add({kPrefillAttnFlops, kPrefillOverhead});
  if (!any_decode) add({kDecodeAttnFlops, kDecodeOverhead});
  if (batch_sizes.size() < 2) add({kGemmFlops, kGemmBw});
  if (missing.empty()) return;
  std::string msg = "under-determined calibration: unconstrained parameters:";
  for (const std::string& name : missing) msg += " " + name;
  throw ConfigError(msg);
}

std::vector<std::uint64_t> parse_lengths(const std::string& field,
                                         std::size_t line_no) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(field);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::uint64_t v = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v == 0) {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": bad context length '" + part + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

CalibrationSet load_calibration_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open samples file " + path.string());
  CalibrationSet set;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("phase", 0) == 0) continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 4) {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": expected 4 columns");
    }
    const std::vector<std::uint64_t> lengths = parse_lengths(cols[2], line_no);
    std::size_t batch_size = 0;
    double observed = 0.0;
    try {
      batch_size = std::stoul(cols[1]);
      observed = std::stod(cols[3]);
    } catch (const std::exception&) {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": non-numeric field");
    }
    if (!(observed > 0.0)) {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": observed_seconds must be > 0");
    }
    if (batch_size != lengths.size()) {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": batch_size does not match context_lengths");
    }
    if (cols[0] == "transfer") {
      for (std::uint64_t tokens : lengths) {
        set.transfers.push_back({tokens, observed});
      }
    } else if (cols[0] == "prefill" || cols[0] == "decode") {
      set.iterations.push_back(
          {{cols[0] == "prefill" ? Phase::kPrefill : Phase::kDecode, lengths},
           observed});
    } else {
      throw ConfigError("samples line " + std::to_string(line_no) +
                        ": unknown phase '" + cols[0] + "'");
    }
  }
  return set;
}

void write_calibration_samples(const std::filesystem::path& path,
                               const CalibrationSet& set) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write samples file " + path.string());
  out.precision(17);
  out << "phase,batch_size,context_lengths,observed_seconds\n";
  const auto join = [](const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ';';
      s += std::to_string(v[i]);
    }
    return s;
  };
  for (const CalibrationSample& s : set.iterations) {
    out << to_string(s.batch.phase) << ',' << s.batch.lengths.size() << ','
        << join(s.batch.lengths) << ',' << s.observed_s << '\n';
  }
  for (const TransferSample& t : set.transfers) {
    out << "transfer,1," << t.tokens << ',' << t.observed_s << '\n';
  }
}

double mean_relative_error(const ModelSpec& model, const HardwareProfile& hw,
                           const std::vector<CalibrationSample>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const CalibrationSample& s : samples) {
    const double predicted = estimate_iteration(model, hw, s.batch).total();
    sum += std::abs(predicted - s.observed_s) / s.observed_s;
  }
  return sum / static_cast<double>(samples.size());
}

CalibrationResult calibrate(const ModelSpec& model,
                            const CalibrationSet& samples,
                            const HardwareProfile& defaults) {
  model.validate();
  check_determined(samples);

  CalibrationResult result;
  result.profile = defaults;
  if (!samples.transfers.empty()) {
    const double bw = fit_comm_bw(model, samples.transfers);
    if (bw > 0.0) result.profile.comm_bw = bw;
  }

  std::vector<PreparedSample> prepared;
  prepared.reserve(samples.iterations.size());
  double min_observed = samples.iterations.front().observed_s;
  for (const CalibrationSample& s : samples.iterations) {
    if (!(s.observed_s > 0.0)) {
      throw ConfigError("calibration sample with non-positive latency");
    }
    prepared.push_back(prepare(model, result.profile, s));
    min_observed = std::min(min_observed, s.observed_s);
  }

  ParamVec x = initial_guess(prepared, to_params(defaults));
  if (objective(prepared, to_params(defaults)) < objective(prepared, x)) {
    x = to_params(defaults);
  }
  PatternSearch search(prepared, min_observed);
  x = search.run(x, result.evaluations);

  apply_params(x, result.profile);
  result.mean_relative_error = objective(prepared, x);
  return result;
}

}  // namespace colosim
