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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "colosim/common/errors.h"
#include "colosim/workload/trace.h"

namespace colosim {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(const std::filesystem::path& path,
                            std::size_t line_no, const std::string& what) {
  throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " +
                    what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

RequestClass parse_class(const std::string& raw,
                         const std::filesystem::path& path,
                         std::size_t line_no) {
  const std::string v = lower(trim(raw));
  if (v == "online") return RequestClass::kOnline;
  if (v == "offline") return RequestClass::kOffline;
  fail_line(path, line_no, "class must be 'online' or 'offline', got '" + raw + "'");
}

double parse_double(const std::string& raw, const char* field,
                    const std::filesystem::path& path, std::size_t line_no) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    fail_line(path, line_no, std::string("malformed ") + field + " '" + raw + "'");
  }
  return out;
}

std::uint32_t check_length(long long v, const char* field,
                           const std::filesystem::path& path,
                           std::size_t line_no) {
  if (v < 1) {
    fail_line(path, line_no,
              std::string(field) + " must be >= 1, got " + std::to_string(v));
  }
  if (v > static_cast<long long>(UINT32_MAX)) {
    fail_line(path, line_no, std::string(field) + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

std::uint32_t parse_length(const std::string& raw, const char* field,
                           const std::filesystem::path& path,
                           std::size_t line_no) {
  const std::string v = trim(raw);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    fail_line(path, line_no, std::string("malformed ") + field + " '" + raw + "'");
  }
  return check_length(out, field, path, line_no);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string col;
  while (std::getline(ss, col, ',')) cols.push_back(col);
  if (!line.empty() && line.back() == ',') cols.emplace_back();
  return cols;
}

Trace load_csv(const std::filesystem::path& path, std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cols = split_csv(line);
    if (index.empty()) {
      for (std::size_t i = 0; i < cols.size(); ++i) index[lower(trim(cols[i]))] = i;
      for (const char* required : {"arrival_ts", "prompt_len", "output_len", "class"}) {
        if (!index.contains(required)) {
          fail_line(path, line_no, std::string("header lacks column '") + required + "'");
        }
      }
      continue;
    }
    if (cols.size() != index.size()) {
      fail_line(path, line_no, "expected " + std::to_string(index.size()) +
                                   " columns, got " + std::to_string(cols.size()));
    }
    TraceRecord r;
    r.arrival_ts = parse_double(cols[index["arrival_ts"]], "arrival_ts", path, line_no);
    r.prompt_len = parse_length(cols[index["prompt_len"]], "prompt_len", path, line_no);
    r.output_len = parse_length(cols[index["output_len"]], "output_len", path, line_no);
    r.cls = parse_class(cols[index["class"]], path, line_no);
    if (auto it = index.find("id"); it != index.end()) r.id = trim(cols[it->second]);
    if (r.id.empty()) r.id = "L" + std::to_string(line_no);
    if (!(r.arrival_ts >= 0.0)) fail_line(path, line_no, "arrival_ts must be >= 0");
    trace.records.push_back(std::move(r));
  }
  return trace;
}

Trace load_jsonl(const std::filesystem::path& path, std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_line(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail_line(path, line_no, "expected a JSON object");
    TraceRecord r;
    try {
      r.arrival_ts = j.at("arrival_ts").get<double>();
      r.prompt_len = check_length(j.at("prompt_len").get<long long>(), "prompt_len", path, line_no);
      r.output_len = check_length(j.at("output_len").get<long long>(), "output_len", path, line_no);
      r.cls = parse_class(j.at("class").get<std::string>(), path, line_no);
      if (j.contains("id")) {
        r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      }
    } catch (const json::exception& e) {
      fail_line(path, line_no, e.what());
    }
    if (r.id.empty()) r.id = "L" + std::to_string(line_no);
    if (!(r.arrival_ts >= 0.0)) fail_line(path, line_no, "arrival_ts must be >= 0");
    trace.records.push_back(std::move(r));
  }
  return trace;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(RequestClass cls) {
  return cls == RequestClass::kOnline ? "online" : "offline";
}

TraceFormat trace_format_for(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  return (ext == ".jsonl" || ext == ".json") ? TraceFormat::kJsonl
                                             : TraceFormat::kCsv;
}

void normalize_trace(Trace& trace) {
  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const TraceRecord& a, const TraceRecord& b) {
                     return a.arrival_ts < b.arrival_ts;
                   });
  std::unordered_set<std::string> ids;
  for (const TraceRecord& r : trace.records) {
    if (r.prompt_len < 1 || r.output_len < 1) {
      throw ConfigError("trace record " + r.id + " has a zero length");
    }
    if (!(r.arrival_ts >= 0.0)) {
      throw ConfigError("trace record " + r.id + " has negative arrival_ts");
    }
    if (!ids.insert(r.id).second) {
      throw ConfigError("duplicate trace id '" + r.id + "'");
    }
  }
}

Trace load_trace(const std::filesystem::path& path, TraceFormat format) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace " + path.string());
  Trace trace = format == TraceFormat::kCsv ? load_csv(path, in)
                                            : load_jsonl(path, in);
  normalize_trace(trace);
  return trace;
}

Trace load_trace(const std::filesystem::path& path) {
  return load_trace(path, trace_format_for(path));
}

void write_trace(const std::filesystem::path& path, const Trace& trace,
                 TraceFormat format) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace " + path.string());
  if (format == TraceFormat::kCsv) {
    out << "arrival_ts,prompt_len,output_len,class,id\n";
    for (const TraceRecord& r : trace.records) {
      out << format_double(r.arrival_ts) << ',' << r.prompt_len << ','
          << r.output_len << ',' << to_string(r.cls) << ',' << r.id << '\n';
    }
    return;
  }
  for (const TraceRecord& r : trace.records) {
    nlohmann::ordered_json j;
    j["arrival_ts"] = r.arrival_ts;
    j["prompt_len"] = r.prompt_len;
    j["output_len"] = r.output_len;
    j["class"] = to_string(r.cls);
    j["id"] = r.id;
    out << j.dump() << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  write_trace(path, trace, trace_format_for(path));
}

void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<std::uint64_t>& counts,
                         double bucket_seconds) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write histogram " + path.string());
  out << "bucket_start,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out << format_double(static_cast<double>(i) * bucket_seconds) << ','
        << counts[i] << '\n';
  }
}

}  // namespace colosim
