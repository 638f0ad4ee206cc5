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

#ifndef MESHSIM_SWEEP_H
#define MESHSIM_SWEEP_H

#include <cstdint>
#include <string>
#include <vector>

#include "meshsim/cluster.h"
#include "meshsim/engine.h"

namespace meshsim {

struct AggregateCell {
  int n = 0;
  int l = 0;
  Tick naive = 0;    // simulated
  Tick batched = 0;  // simulated

  bool operator==(const AggregateCell&) const = default;
};

// One engine per cell, row-major over n in 1..max_n and l in 1..max_l.
std::vector<AggregateCell> SweepAggregateSerial(int max_n, int max_l);
// Same cells computed with OpenMP; output order matches the serial sweep.
std::vector<AggregateCell> SweepAggregateParallel(int max_n, int max_l);

struct RolloverStats {
  int n = 0;
  int max_live = 0;              // non-Gone pods, from the update on
  int min_running = 0;           // Running pods, from the update on
  int max_desired_sum = 0;       // desired(new) + desired(old)
  int max_replica_sets = 0;      // replica sets with live pods
  Tick ready_at = 0;             // initial pods all Running
  Tick finished_at = 0;          // old replica set drained
  std::vector<std::string> update_events;  // scaling messages of the update

  bool operator==(const RolloverStats&) const = default;
};

// Creates a deployment of `n` pods, waits for readiness, rolls a new
// image and records the invariants after every event.
RolloverStats RunRollover(int n, ClusterOptions options = {});

std::vector<RolloverStats> SweepRolloverSerial(int max_n, ClusterOptions options = {});
std::vector<RolloverStats> SweepRolloverParallel(int max_n, ClusterOptions options = {});

}  // namespace meshsim

#endif  // MESHSIM_SWEEP_H
