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

#include "meshsim/budget.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

void Topology::AddEdge(std::string from, std::string to) {
  children[std::move(from)].push_back(std::move(to));
}

std::string Topology::Root() const {
  std::set<std::string> callees;
  for (const auto& [_, kids] : children) callees.insert(kids.begin(), kids.end());
  std::vector<std::string> roots;
  for (const auto& [node, _] : children) {
    if (!callees.contains(node)) roots.push_back(node);
  }
  if (roots.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("topology has {} root candidates; pass the root explicitly",
                            roots.size()));
  }
  return roots.front();
}

namespace {

enum class Mark { kNone, kActive, kDone };

// Returns the depth (in levels) of the deepest path below `node`.
int Depth(const Topology& t, const std::string& node,
          std::map<std::string, Mark>& marks, std::map<std::string, int>& memo) {
  Mark& mark = marks[node];
  if (mark == Mark::kActive) {
    throw Error(ErrorCode::kCyclicTopology,
                fmt::format("cycle through '{}'", node));
  }
  if (mark == Mark::kDone) return memo[node];
  mark = Mark::kActive;
  int deepest = 0;
  if (auto it = t.children.find(node); it != t.children.end()) {
    for (const auto& child : it->second) {
      deepest = std::max(deepest, Depth(t, child, marks, memo));
    }
  }
  marks[node] = Mark::kDone;
  return memo[node] = deepest + 1;
}

}  // namespace

int CountLayers(const Topology& topology, std::string_view root) {
  std::map<std::string, Mark> marks;
  std::map<std::string, int> memo;
  return Depth(topology, std::string(root), marks, memo);
}

BudgetResult SolveBudget(const BudgetInputs& in) {
  if (in.user_timeout <= 0 || in.gateway_budget <= 0 || in.safety_factor <= 0 ||
      in.layers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "user timeout, gateway budget, safety factor and layers must be positive");
  }
  BudgetResult r;
  r.inputs = in;
  const Tick L = in.layers;
  r.per_try_timeout = (2 * in.gateway_budget + L) / (2 * L);
  r.max_user_to_gateway = in.user_timeout - in.safety_factor * in.gateway_budget;
  auto& d = r.derivation;
  d.push_back(fmt::format("t x L < {}ms", in.gateway_budget));
  d.push_back(fmt::format("{}(t x L) + C < {}ms", in.safety_factor, in.user_timeout));
  d.push_back(fmt::format("{}({}) + C < {}", in.safety_factor, in.gateway_budget,
                          in.user_timeout));
  d.push_back(fmt::format("C < {} - {}", in.user_timeout,
                          in.safety_factor * in.gateway_budget));
  d.push_back(fmt::format("C < {}", r.max_user_to_gateway));
  d.push_back(fmt::format("L = {}", in.layers));
  d.push_back(fmt::format("{} = t({})", in.gateway_budget, in.layers));
  d.push_back(fmt::format("t = {}", r.per_try_timeout));
  if (r.max_user_to_gateway <= 0) {
    throw Error(ErrorCode::kInfeasibleBudget,
                fmt::format("user timeout {}ms leaves C < {} after {} x {}ms",
                            in.user_timeout, r.max_user_to_gateway, in.safety_factor,
                            in.gateway_budget));
  }
  return r;
}

RetryPolicy MakeRetryPolicy(const BudgetResult& result, std::optional<int> attempts) {
  RetryPolicy p;
  p.attempts = attempts.value_or(result.inputs.safety_factor);
  if (p.attempts < 1) throw Error(ErrorCode::kInvalidArgument, "attempts must be >= 1");
  p.per_try_timeout = result.per_try_timeout;
  return p;
}

std::string RenderBudget(const BudgetResult& result, const RetryPolicy& retry) {
  std::string out;
  for (const auto& line : result.derivation) out += line + "\n";
  out += fmt::format("perTryTimeout = {}ms\n", result.per_try_timeout);
  out += fmt::format("maxUserToGateway < {}ms\n", result.max_user_to_gateway);
  out += "\n";
  out += "retries:\n";
  out += fmt::format("  attempts: {}\n", retry.attempts);
  out += fmt::format("  perTryTimeout: {}ms\n", retry.per_try_timeout);
  return out;
}

Topology ParseTopologyCsv(std::string_view csv) {
  Topology t;
  const std::vector<std::string> lines = text::SplitLines(csv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = text::Trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string> f = text::Split(line, ',');
    if (f.size() != 2) {
      throw Error(ErrorCode::kParseError, fmt::format("line {}: expected from,to", n + 1));
    }
    std::string from(text::Trim(f[0]));
    std::string to(text::Trim(f[1]));
    if (n == 0 && from == "from" && to == "to") continue;
    if (from.empty() || to.empty()) {
      throw Error(ErrorCode::kParseError, fmt::format("line {}: empty node name", n + 1));
    }
    t.children.try_emplace(to);
    t.AddEdge(std::move(from), std::move(to));
  }
  return t;
}

}  // namespace meshsim
