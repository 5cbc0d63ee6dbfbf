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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace colosim {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = kFnvOffset);
// "fnv1a64:<16 hex digits>" over the file bytes.
std::string file_digest(const std::filesystem::path& path);

std::string_view tool_version();

struct RunManifest {
  std::string tool_version;
  std::string command;      // simulate | sweep
  std::string config_json;  // resolved snapshot
  std::uint64_t seed = 0;
  std::string policy;
  std::string online_trace;
  std::string online_digest;
  std::string offline_trace;  // empty when absent
  std::string offline_digest;
  bool verbose_events = false;
  std::vector<std::string> outputs;  // file names inside the output dir
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(std::string_view text);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace colosim
