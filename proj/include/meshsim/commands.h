//
// Copyright 2026 The meshsim Authors.
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
//

#ifndef MESHSIM_COMMANDS_H
#define MESHSIM_COMMANDS_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "meshsim/engine.h"
#include "meshsim/error.h"
#include "meshsim/manifest.h"

namespace meshsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitLivelock = 3;

struct GlobalOptions {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  Tick max_ticks = kDefaultMaxTicks;
};

// Prints `ERROR <code>: <message>` and maps the code to an exit status.
int ReportError(const Error& error, std::ostream& err);

int Simulate(const std::string& scenario, const GlobalOptions& global, std::ostream& out,
             std::ostream& err);

int ValidateManifests(const std::vector<std::string>& files, Environment environment,
                      std::ostream& out, std::ostream& err);

struct BudgetArgs {
  std::optional<int> layers;
  std::string topology;  // from,to CSV
  std::string root;      // defaults to the topology's unique root
  Tick user_timeout = 10'000;
  Tick gateway_budget = 2'000;
  int safety_factor = 3;
  std::optional<int> attempts;
};
int Budget(const BudgetArgs& args, std::ostream& out, std::ostream& err);

struct CostArgs {
  int n = 1;
  int l = 1;
  bool sweep = false;
  int max_n = 50;
  int max_l = 5;
};
int Cost(const CostArgs& args, std::ostream& out, std::ostream& err);

struct MemoryArgs {
  double heap = 0;
  int threads = 0;
  int classes = 0;
  double stack = 0.256;
};
int Memory(const MemoryArgs& args, std::ostream& out, std::ostream& err);

struct SizingArgs {
  double original = 0;
  std::vector<double> parts;
  std::optional<double> claimed_total;
};
int Sizing(const SizingArgs& args, std::ostream& out, std::ostream& err);

// Writes plan.yaml and violations.txt into the output directory. Exit 1
// when violations are found or a unit cannot be assigned.
int Decompose(const std::string& units, const std::string& edges, const GlobalOptions& global,
              std::ostream& out, std::ostream& err);

int Describe(const std::string& scenario, const std::string& deployment,
             std::optional<Tick> at, const GlobalOptions& global, std::ostream& out,
             std::ostream& err);

}  // namespace meshsim::cli

#endif  // MESHSIM_COMMANDS_H
