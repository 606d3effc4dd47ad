// Copyright 2026 The compoundcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace compoundcap::cli {

enum ExitCode : int { kOk = 0, kInput = 1, kNumeric = 2, kBudget = 3 };

struct RunConfig {
  std::string command;
  std::string channel, compound, state, states;
  int m0 = 1;
  std::vector<int> m1{1};
  double eps = 0;
  int n = 1;
  int samples = 200;
  std::optional<std::uint64_t> seed;
  double tol = 1e-6;
  std::string out;
  std::string format = "json";
  // command specific
  std::string variant = "uninformed";
  bool classical = false;
  std::string mode = "is";
  std::vector<int> dims;
  std::vector<std::string> quantities;
  std::vector<std::string> net, net_at, continuity, converse, union_bound, aep, superdense, teleport;
};

/// Parses argv, runs the command and writes the report to cfg.out or `out`.
/// Diagnostics go to `err`. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace compoundcap::cli
