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

#ifndef MESHSIM_MODELS_H
#define MESHSIM_MODELS_H

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/budget.h"
#include "meshsim/engine.h"

namespace meshsim {

enum class CallStrategy { kNaive, kBatched };
std::string_view CallStrategyName(CallStrategy strategy);

struct CallPlan {
  int n_items = 1;
  int layers = 1;
  CallStrategy strategy = CallStrategy::kNaive;
};

// Naive: N x 2L. Batched: 2N + L. Throws InvalidArgument when N or L < 1.
std::int64_t CallCost(const CallPlan& plan);
// 2(N + L).
std::int64_t RuntimeBound(int n, int l);

// Replays the call as engine events with unit cost per hop and per local
// item, and returns the elapsed ticks. `caller` and `callee` must be L
// call edges apart in `topology` (TopologyMismatch otherwise).
Tick SimulateAggregateCall(Engine& engine, const CallPlan& plan,
                           const Topology& topology, std::string_view caller,
                           std::string_view callee);
// Same, over a synthetic chain of exactly L hops.
Tick SimulateAggregateCall(Engine& engine, const CallPlan& plan);

inline constexpr double kDefaultStackMiB = 0.256;

struct MemoryInputs {
  double heap = 0;  // MiB
  int threads = 0;
  double stack_per_thread = kDefaultStackMiB;  // MiB
  int classes = 0;
};

struct MemoryPrediction {
  double non_heap = 0;
  double total = 0;
};

// non_heap = threads x stack + classes x 7 / 1000; total = heap + non_heap.
MemoryPrediction PredictMemory(const MemoryInputs& inputs);

struct SizingCase {
  double original = 0;  // X, MiB
  std::vector<double> parts;
  // A total printed alongside the case, reported when it disagrees with
  // the computed sum.
  std::optional<double> claimed_total;
};

struct SizingVerdict {
  std::vector<bool> part_pass;  // x_i < X
  double sum = 0;
  bool sum_exceeds_original = false;
  bool pass = false;  // every part passes
  std::optional<std::string> discrepancy;
};

SizingVerdict CheckSizing(const SizingCase& sizing);
// The reference sizing case (X = 800, four parts of 400 and one of 600)
// carries a stated total of 3200. Returns it for exactly this input.
std::optional<double> ReferenceStatedTotal(double original, const std::vector<double>& parts);
std::string RenderSizing(const SizingCase& sizing, const SizingVerdict& verdict);

enum class DataStrategy { kMeshExpansion, kPersistentVolume, kServiceEntry };
std::string_view DataStrategyName(DataStrategy strategy);
DataStrategy ParseDataStrategy(std::string_view s);

struct StrategyRejection {
  DataStrategy strategy;
  std::string code;  // Unstable or StatefulInStateless

  bool operator==(const StrategyRejection&) const = default;
};

struct StrategyChoice {
  std::optional<DataStrategy> choice;  // empty: NoViableStrategy
  std::vector<StrategyRejection> rejections;
};

StrategyChoice SelectDataStrategy(const std::set<DataStrategy>& candidates);

// `N,L,naive,batched,bound` rows with header.
std::string RenderCostSweepCsv(int max_n, int max_l);

}  // namespace meshsim

#endif  // MESHSIM_MODELS_H
