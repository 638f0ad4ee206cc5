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

#include "meshsim/sweep.h"

#include <algorithm>
#include <exception>
#include <set>

#include "meshsim/error.h"
#include "meshsim/models.h"

namespace meshsim {

namespace {

AggregateCell Cell(int n, int l) {
  AggregateCell c{n, l, 0, 0};
  {
    Engine engine;
    c.naive = SimulateAggregateCall(engine, {n, l, CallStrategy::kNaive});
  }
  {
    Engine engine;
    c.batched = SimulateAggregateCall(engine, {n, l, CallStrategy::kBatched});
  }
  return c;
}

void CheckGrid(int a, int b) {
  if (a < 1 || b < 1) throw Error(ErrorCode::kInvalidArgument, "sweep bounds must be >= 1");
}

// Runs fn(i) for i in [0, count) across threads and rethrows the first
// failure on the calling thread.
template <typename Fn>
void ParallelFor(int count, Fn fn) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(meshsim_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<AggregateCell> SweepAggregateSerial(int max_n, int max_l) {
  CheckGrid(max_n, max_l);
  std::vector<AggregateCell> out;
  out.reserve(static_cast<std::size_t>(max_n) * max_l);
  for (int n = 1; n <= max_n; ++n) {
    for (int l = 1; l <= max_l; ++l) out.push_back(Cell(n, l));
  }
  return out;
}

std::vector<AggregateCell> SweepAggregateParallel(int max_n, int max_l) {
  CheckGrid(max_n, max_l);
  std::vector<AggregateCell> out(static_cast<std::size_t>(max_n) * max_l);
  ParallelFor(max_n * max_l, [&](int i) { out[i] = Cell(i / max_l + 1, i % max_l + 1); });
  return out;
}

RolloverStats RunRollover(int n, ClusterOptions options) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "rollover needs at least one pod");
  Engine engine;
  Cluster cluster(engine, options);
  DeploymentSpec spec;
  spec.name = "web";
  spec.labels = {{"app", "web"}};
  spec.replicas = n;
  spec.pod_template.labels = {{"app", "web"}, {"version", "v1"}};
  spec.pod_template.container_name = "web";
  spec.pod_template.image = "web:1";
  spec.pod_template.container_port = 8080;
  cluster.ApplyDeployment(spec);
  engine.Run();

  RolloverStats stats;
  stats.n = n;
  stats.ready_at = engine.now();
  stats.min_running = cluster.RunningCount("web");
  stats.max_live = cluster.LiveCount("web");
  const std::size_t events_before = cluster.deployment("web").events.size();

  auto observe = [&] {
    stats.max_live = std::max(stats.max_live, cluster.LiveCount("web"));
    stats.min_running = std::min(stats.min_running, cluster.RunningCount("web"));
    const DeploymentState& state = cluster.deployment("web");
    int desired = cluster.replica_set(state.new_replica_set).desired;
    if (!state.old_replica_set.empty()) {
      desired += cluster.replica_set(state.old_replica_set).desired;
    }
    stats.max_desired_sum = std::max(stats.max_desired_sum, desired);
    std::set<std::string> sets;
    for (const auto& pod : cluster.pods()) {
      if (pod.phase != PodPhase::kGone) sets.insert(pod.replica_set);
    }
    stats.max_replica_sets = std::max(stats.max_replica_sets, static_cast<int>(sets.size()));
  };
  engine.SetPostEventHook(observe);

  PodTemplate next = spec.pod_template;
  next.image = "web:2";
  next.labels["version"] = "v2";
  cluster.RollingUpdate("web", next, [&] { stats.finished_at = engine.now(); });
  observe();
  engine.Run();

  const auto& events = cluster.deployment("web").events;
  for (std::size_t i = events_before; i < events.size(); ++i) {
    stats.update_events.push_back(events[i].message);
  }
  return stats;
}

std::vector<RolloverStats> SweepRolloverSerial(int max_n, ClusterOptions options) {
  CheckGrid(max_n, 1);
  std::vector<RolloverStats> out;
  for (int n = 1; n <= max_n; ++n) out.push_back(RunRollover(n, options));
  return out;
}

std::vector<RolloverStats> SweepRolloverParallel(int max_n, ClusterOptions options) {
  CheckGrid(max_n, 1);
  std::vector<RolloverStats> out(static_cast<std::size_t>(max_n));
  ParallelFor(max_n, [&](int i) { out[i] = RunRollover(i + 1, options); });
  return out;
}

}  // namespace meshsim
