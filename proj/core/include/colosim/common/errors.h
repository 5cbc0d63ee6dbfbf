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

#include <stdexcept>
#include <string>

namespace colosim {

// Raised for malformed configs, traces and sample files. The CLI maps this
// to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a scenario cannot be simulated at all, e.g. a single request
// whose KV footprint exceeds an instance's pool. Exit code 3.
class InfeasibleScenario : public std::runtime_error {
 public:
  explicit InfeasibleScenario(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace colosim
