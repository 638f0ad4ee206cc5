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

#ifndef MESHSIM_SCENARIO_H
#define MESHSIM_SCENARIO_H

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/cluster.h"
#include "meshsim/engine.h"
#include "meshsim/manifest.h"
#include "meshsim/mesh.h"

namespace meshsim {

struct LoadProfile {
  std::string host;
  double rps = 0;
  Tick from = 0;
  Tick to = 0;  // exclusive
  RequestClass klass = RequestClass::kData;
  Entrypoint entrypoint = Entrypoint::kGateway;
  std::string cookie;
  Tick jitter = 0;
};

enum class DirectiveKind { kUpdateImage, kConfigChange, kRollback, kDescribe };

struct Directive {
  DirectiveKind kind = DirectiveKind::kDescribe;
  Tick at = 0;
  int line = 0;
  std::string target;  // deployment or config map
  std::string key;
  std::string value;   // image, config value
  std::string author;
  int revision = 0;
};

enum class StopKind { kIdle, kAtTick, kRolloutComplete };

struct Scenario {
  std::string base_dir;
  std::vector<std::string> manifests;
  std::vector<std::string> manifest_texts;  // inline sources, for tests
  Environment environment = Environment::kOnPremise;
  std::uint64_t seed = 0;
  ClusterOptions cluster;
  Tick default_service_time = 10;
  std::vector<std::pair<std::string, Tick>> service_times;
  std::vector<AutoscalerSpec> autoscalers;
  std::vector<LoadProfile> loads;
  std::vector<std::string> request_files;
  std::vector<Directive> timeline;
  StopKind stop = StopKind::kIdle;
  Tick stop_at = 0;
};

inline constexpr Tick kAutoscaleWindow = 1000;

// Line-oriented directives; `#` starts a comment. Throws ParseError with
// the line number, including when directive ticks decrease.
Scenario ParseScenario(std::string_view text, std::string base_dir = ".");
Scenario LoadScenario(const std::string& path);

struct DescribeSnapshot {
  Tick tick = 0;
  std::string deployment;
  std::string text;

  bool operator==(const DescribeSnapshot&) const = default;
};

struct SimulationResult {
  ValidationReport validation;
  bool ran = false;
  Tick end_tick = 0;
  Trace trace;
  std::vector<RequestOutcome> outcomes;
  std::string history_csv;
  std::vector<DescribeSnapshot> snapshots;
  std::string describe;  // every deployment at the end of the run
  std::string pods;
  std::map<std::string, int> running;  // per deployment at the end
  std::vector<std::string> rejected;   // directives the pipeline refused

  bool operator==(const SimulationResult&) const = default;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  Tick max_ticks = kDefaultMaxTicks;
  std::optional<Tick> stop_at;  // overrides the scenario's stop rule
  // Called after every event.
  std::function<void(const Engine&, const Cluster&)> observer;
};

// Loads and validates the manifests. Returns with ran == false when
// validation fails; throws Livelock when the tick budget runs out.
SimulationResult RunScenario(const Scenario& scenario, const RunOptions& options = {});

// Writes trace.txt, metrics.csv, outcomes.csv, history.csv, describe.txt
// and pods.txt into `dir`.
void WriteArtifacts(const SimulationResult& result, const std::string& dir);

}  // namespace meshsim

#endif  // MESHSIM_SCENARIO_H
