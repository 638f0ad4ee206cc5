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

#include "meshsim/models.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

std::string_view CallStrategyName(CallStrategy strategy) {
  return strategy == CallStrategy::kNaive ? "Naive" : "Batched";
}

namespace {

void CheckPlan(const CallPlan& plan) {
  if (plan.n_items < 1 || plan.layers < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("call plan needs N >= 1 and L >= 1 (got N={}, L={})",
                            plan.n_items, plan.layers));
  }
}

// Unweighted BFS distance in call edges; -1 when unreachable.
int Distance(const Topology& t, std::string_view from, std::string_view to) {
  std::map<std::string, int, std::less<>> dist{{std::string(from), 0}};
  std::deque<std::string> queue{std::string(from)};
  while (!queue.empty()) {
    std::string node = queue.front();
    queue.pop_front();
    if (node == to) return dist[node];
    auto it = t.children.find(node);
    if (it == t.children.end()) continue;
    for (const auto& child : it->second) {
      if (dist.try_emplace(child, dist[node] + 1).second) queue.push_back(child);
    }
  }
  return -1;
}

// Schedules `steps` unit events back to back, then runs `then`.
void Chain(Engine& engine, std::int64_t steps, std::function<void()> then) {
  if (steps == 0) {
    then();
    return;
  }
  engine.ScheduleAfter(1, EventKind::kCallStep,
                       [&engine, steps, then = std::move(then)]() mutable {
                         Chain(engine, steps - 1, std::move(then));
                       });
}

// One round trip (L hops out, L back) per item, issued sequentially.
void NaiveItems(Engine& engine, std::int64_t remaining, std::int64_t l, Tick* end) {
  if (remaining == 0) {
    *end = engine.now();
    return;
  }
  Chain(engine, l, [&engine, remaining, l, end] {
    Chain(engine, l, [&engine, remaining, l, end] {
      NaiveItems(engine, remaining - 1, l, end);
    });
  });
}

}  // namespace

std::int64_t CallCost(const CallPlan& plan) {
  CheckPlan(plan);
  const std::int64_t n = plan.n_items;
  const std::int64_t l = plan.layers;
  return plan.strategy == CallStrategy::kNaive ? n * 2 * l : 2 * n + l;
}

std::int64_t RuntimeBound(int n, int l) {
  if (n < 1 || l < 1) throw Error(ErrorCode::kInvalidArgument, "N and L must be >= 1");
  return 2 * (static_cast<std::int64_t>(n) + l);
}

Tick SimulateAggregateCall(Engine& engine, const CallPlan& plan) {
  CheckPlan(plan);
  const Tick start = engine.now();
  Tick end = -1;
  const std::int64_t n = plan.n_items;
  const std::int64_t l = plan.layers;
  if (plan.strategy == CallStrategy::kNaive) {
    NaiveItems(engine, n, l, &end);
  } else {
    // Local pass over N ids, one batched round trip of L hops, local pass
    // over the N results.
    Chain(engine, n, [&engine, &end, n, l] {
      Chain(engine, l, [&engine, &end, n] {
        Chain(engine, n, [&engine, &end] { end = engine.now(); });
      });
    });
  }
  engine.Run();
  if (end < 0) throw Error(ErrorCode::kInvalidArgument, "aggregate call did not finish");
  return end - start;
}

Tick SimulateAggregateCall(Engine& engine, const CallPlan& plan,
                           const Topology& topology, std::string_view caller,
                           std::string_view callee) {
  CheckPlan(plan);
  const int distance = Distance(topology, caller, callee);
  if (distance != plan.layers) {
    throw Error(ErrorCode::kTopologyMismatch,
                fmt::format("'{}' is {} layers from '{}', plan expects {}", callee,
                            distance < 0 ? std::string("unreachable")
                                         : std::to_string(distance),
                            caller, plan.layers));
  }
  return SimulateAggregateCall(engine, plan);
}

MemoryPrediction PredictMemory(const MemoryInputs& in) {
  if (in.heap < 0 || in.threads < 0 || in.stack_per_thread < 0 || in.classes < 0) {
    throw Error(ErrorCode::kInvalidArgument, "memory inputs must be non-negative");
  }
  MemoryPrediction p;
  p.non_heap = in.threads * in.stack_per_thread + in.classes * 7.0 / 1000.0;
  p.total = in.heap + p.non_heap;
  return p;
}

SizingVerdict CheckSizing(const SizingCase& c) {
  if (c.parts.empty()) throw Error(ErrorCode::kInvalidArgument, "no parts given");
  SizingVerdict v;
  v.pass = true;
  for (double x : c.parts) {
    v.part_pass.push_back(x < c.original);
    v.pass = v.pass && v.part_pass.back();
    v.sum += x;
  }
  v.sum_exceeds_original = v.sum > c.original;
  if (c.claimed_total && *c.claimed_total != v.sum) {
    v.discrepancy = fmt::format("stated total {} differs from computed sum {}",
                                text::FormatNumber(*c.claimed_total),
                                text::FormatNumber(v.sum));
  }
  return v;
}

std::optional<double> ReferenceStatedTotal(double original, const std::vector<double>& parts) {
  std::vector<double> sorted = parts;
  std::sort(sorted.begin(), sorted.end());
  if (original == 800 && sorted == std::vector<double>{400, 400, 400, 400, 600}) return 3200;
  return std::nullopt;
}

std::string RenderSizing(const SizingCase& c, const SizingVerdict& v) {
  std::string out = fmt::format("{:<16}{}\n", "original", text::FormatNumber(c.original));
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    out += fmt::format("{:<16}{} {}\n", fmt::format("part[{}]", i),
                       text::FormatNumber(c.parts[i]), v.part_pass[i] ? "pass" : "FAIL");
  }
  out += fmt::format("{:<16}{}\n", "sum", text::FormatNumber(v.sum));
  out += fmt::format("{:<16}{}\n", "sum > original", v.sum_exceeds_original ? "yes" : "no");
  out += fmt::format("{:<16}{}\n", "verdict", v.pass ? "pass" : "FAIL");
  if (v.discrepancy) out += fmt::format("{:<16}{}\n", "note", *v.discrepancy);
  return out;
}

std::string_view DataStrategyName(DataStrategy strategy) {
  switch (strategy) {
    case DataStrategy::kMeshExpansion: return "MeshExpansion";
    case DataStrategy::kPersistentVolume: return "PersistentVolume";
    case DataStrategy::kServiceEntry: return "ServiceEntry";
  }
  return "Unknown";
}

DataStrategy ParseDataStrategy(std::string_view s) {
  const std::string v = text::ToLower(text::Trim(s));
  if (v == "meshexpansion") return DataStrategy::kMeshExpansion;
  if (v == "persistentvolume") return DataStrategy::kPersistentVolume;
  if (v == "serviceentry") return DataStrategy::kServiceEntry;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown data strategy '{}'", s));
}

StrategyChoice SelectDataStrategy(const std::set<DataStrategy>& candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate strategies");
  }
  StrategyChoice out;
  for (DataStrategy s : candidates) {
    switch (s) {
      case DataStrategy::kMeshExpansion:
        out.rejections.push_back({s, "Unstable"});
        break;
      case DataStrategy::kPersistentVolume:
        out.rejections.push_back({s, "StatefulInStateless"});
        break;
      case DataStrategy::kServiceEntry:
        out.choice = s;
        break;
    }
  }
  return out;
}

std::string RenderCostSweepCsv(int max_n, int max_l) {
  std::string out = "N,L,naive,batched,bound\n";
  for (int n = 1; n <= max_n; ++n) {
    for (int l = 1; l <= max_l; ++l) {
      out += fmt::format("{},{},{},{},{}\n", n, l,
                         CallCost({n, l, CallStrategy::kNaive}),
                         CallCost({n, l, CallStrategy::kBatched}), RuntimeBound(n, l));
    }
  }
  return out;
}

}  // namespace meshsim
