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

#include "colosim/config/manifest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "colosim/common/errors.h"
#include "json.hpp"

#ifndef COLOSIM_VERSION
#define COLOSIM_VERSION "0.0.0"
#endif

namespace colosim {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

std::string_view tool_version() { return COLOSIM_VERSION; }

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["policy"] = m.policy;
  j["online_trace"] = {{"path", m.online_trace}, {"digest", m.online_digest}};
  j["offline_trace"] = {{"path", m.offline_trace}, {"digest", m.offline_digest}};
  j["verbose_events"] = m.verbose_events;
  j["outputs"] = m.outputs;
  j["config"] = nlohmann::ordered_json::parse(m.config_json);
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text.begin(), text.end());
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.policy = j.at("policy").get<std::string>();
    m.online_trace = j.at("online_trace").at("path").get<std::string>();
    m.online_digest = j.at("online_trace").at("digest").get<std::string>();
    m.offline_trace = j.at("offline_trace").at("path").get<std::string>();
    m.offline_digest = j.at("offline_trace").at("digest").get<std::string>();
    m.verbose_events = j.at("verbose_events").get<bool>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.config_json = j.at("config").dump(2) + "\n";
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_manifest(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace colosim
