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

#ifndef MESHSIM_BUDGET_H
#define MESHSIM_BUDGET_H

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/engine.h"
#include "meshsim/manifest.h"

namespace meshsim {

struct BudgetInputs {
  Tick user_timeout = 10'000;
  Tick gateway_budget = 2'000;
  int safety_factor = 3;
  int layers = 1;
};

struct BudgetResult {
  BudgetInputs inputs;
  Tick per_try_timeout = 0;
  Tick max_user_to_gateway = 0;
  std::vector<std::string> derivation;
};

// Caller -> callees. Nodes that only appear as callees need no entry.
struct Topology {
  std::map<std::string, std::vector<std::string>> children;

  void AddEdge(std::string from, std::string to);
  // The unique node that is never a callee. Throws InvalidArgument when
  // there is none or more than one.
  std::string Root() const;
};

// Distinct hierarchy levels reachable from `root`, the root included.
// Throws CyclicTopology.
int CountLayers(const Topology& topology, std::string_view root);

// t = round-half-up(gateway / L), C = user - safety * gateway. Throws
// InfeasibleBudget when C <= 0 and InvalidArgument on non-positive inputs.
BudgetResult SolveBudget(const BudgetInputs& inputs);

// attempts defaults to the safety factor.
RetryPolicy MakeRetryPolicy(const BudgetResult& result,
                            std::optional<int> attempts = std::nullopt);

// Derivation lines followed by the retry block in manifest dialect.
std::string RenderBudget(const BudgetResult& result, const RetryPolicy& retry);

// `from,to` rows; a `from,to` header row is skipped.
Topology ParseTopologyCsv(std::string_view text);

}  // namespace meshsim

#endif  // MESHSIM_BUDGET_H
