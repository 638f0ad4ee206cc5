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

#ifndef MESHSIM_CLUSTER_H
#define MESHSIM_CLUSTER_H

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/engine.h"
#include "meshsim/manifest.h"

namespace meshsim {

enum class PodPhase { kPending, kRunning, kTerminating, kGone };
std::string_view PodPhaseName(PodPhase phase);

struct Pod {
  // <deployment>-<replica set hash>-<counter>
  std::string id;
  std::string deployment;
  std::string replica_set;
  std::string version;
  PodPhase phase = PodPhase::kPending;
  Tick created_at = 0;
  Tick ready_at = -1;
  Tick gone_at = -1;
};

struct ReplicaSet {
  std::string id;
  std::string deployment;
  PodTemplate pod_template;
  int desired = 0;
  int next_suffix = 0;
};

// One row of the deployment's Events table.
struct ScalingEvent {
  Tick tick = 0;
  std::string message;

  static constexpr std::string_view kType = "Normal";
  static constexpr std::string_view kReason = "ScalingReplicaSet";
  static constexpr std::string_view kFrom = "deployment-controller";
};

struct DeploymentState {
  DeploymentSpec spec;  // spec.replicas tracks the current desired count
  std::string new_replica_set;
  std::string old_replica_set;  // set only while a rollover runs
  std::vector<ScalingEvent> events;
  Tick created_at = 0;
};

struct ClusterOptions {
  Tick startup_delay = 19;
  Tick termination_delay = 0;
};

inline constexpr std::string_view kControllerSource = "deployment-controller";

// Deployments own replica sets which own pods. Rollovers surge by exactly
// one pod and never take a Running pod away before its replacement is
// Running, so a deployment of N holds at most N+1 live pods and at least N
// Running pods once it has become ready.
class Cluster {
 public:
  explicit Cluster(Engine& engine, ClusterOptions options = {});

  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  // New name: creates the replica set and `replicas` Pending pods. Same
  // spec: no-op. Changed template: starts a rollover. Changed replica
  // count only: scales. Throws NameCollision if a Service owns the name.
  void ApplyDeployment(const DeploymentSpec& spec);
  void ApplyService(const ServiceSpec& spec);

  // Replaces the template one pod at a time. `on_complete` runs once the
  // old replica set reaches zero (immediately when nothing changes).
  // Throws NotFound or UpdateInProgress.
  void RollingUpdate(std::string_view name, const PodTemplate& pod_template,
                     std::function<void()> on_complete = {});
  bool RolloverActive(std::string_view name) const;

  // desired = clamp(ceil(window_load / threshold), min, max). Applied
  // unless a rollover is running. Returns the computed desired count.
  int AutoscaleTick(const AutoscalerSpec& spec, std::int64_t window_load);
  void Scale(std::string_view name, int replicas);

  std::string Describe(std::string_view name) const;
  std::string ListPods() const;

  bool HasDeployment(std::string_view name) const;
  const DeploymentState& deployment(std::string_view name) const;
  std::vector<std::string> DeploymentNames() const;
  const ReplicaSet& replica_set(std::string_view id) const;
  const std::vector<Pod>& pods() const { return pods_; }
  const Pod* FindPod(std::string_view id) const;

  std::vector<const Pod*> RunningPods(std::string_view deployment) const;
  int RunningCount(std::string_view deployment) const;
  // Pods that are not Gone.
  int LiveCount(std::string_view deployment) const;

  Engine& engine() { return engine_; }
  const ClusterOptions& options() const { return options_; }

 private:
  struct Rollover {
    int target = 0;
    std::vector<std::function<void()>> on_complete;
  };

  DeploymentState& MutableDeployment(std::string_view name);
  ReplicaSet& EnsureReplicaSet(const std::string& deployment,
                               const PodTemplate& pod_template);
  void Record(DeploymentState& state, std::string message);
  void AddPod(ReplicaSet& rs);
  void OnPodReady(std::size_t index);
  void TerminatePod(std::size_t index, std::function<void()> then);
  void ScaleReplicaSet(DeploymentState& state, ReplicaSet& rs, int desired);
  void RolloverScaleUp(const std::string& name);
  void RolloverScaleDown(const std::string& name);
  void FinishRollover(const std::string& name);
  void PublishGauges(const std::string& deployment);

  Engine& engine_;
  ClusterOptions options_;
  std::map<std::string, DeploymentState, std::less<>> deployments_;
  std::map<std::string, ReplicaSet, std::less<>> replica_sets_;
  std::map<std::string, std::string, std::less<>> services_;
  std::map<std::string, Rollover, std::less<>> rollovers_;
  std::vector<Pod> pods_;
  std::map<std::string, std::size_t, std::less<>> pod_index_;
};

// "Scaled up replica set <id> to <n>" and its scale-down counterpart.
std::string ScaledUpMessage(std::string_view replica_set, int n);
std::string ScaledDownMessage(std::string_view replica_set, int n);

// Human age for describe output: 950ms, 24s, 2m, 3h.
std::string FormatAge(Tick age);

}  // namespace meshsim

#endif  // MESHSIM_CLUSTER_H
