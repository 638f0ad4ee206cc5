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

#ifndef MESHSIM_PIPELINE_H
#define MESHSIM_PIPELINE_H

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/cluster.h"
#include "meshsim/engine.h"
#include "meshsim/manifest.h"

namespace meshsim {

inline constexpr std::string_view kPipelineSource = "pipeline";
inline constexpr std::string_view kRevisionAnnotation = "config/revision";

// Replaces every `${key}` and `${map.key}` in `value`. Unqualified keys
// must be defined by exactly one map. Throws AmbiguousKey, UnknownKey or
// UnknownMap.
std::string Dereference(std::string_view value, const std::vector<ConfigMapSpec>& maps);

// Inlines config-map values into a pod template: keyed references take the
// value, keyless references take the whole map as `k=v` pairs joined by
// `;`, envFrom maps expand to one variable per key, and literal values are
// dereferenced.
PodTemplate ResolveTemplate(const PodTemplate& pod_template,
                            const std::vector<ConfigMapSpec>& maps);

struct ConfigRevision {
  int revision = 0;
  ConfigMapSpec configmap;
  std::string author;
  Tick received_at = 0;
  Tick applied_at = -1;
  std::vector<std::string> targets;  // empty: every deployment referencing the map
  std::optional<int> rollback_of;

  bool operator==(const ConfigRevision&) const = default;
};

// Linearizes config changes: at most one revision rolls out at a time, in
// enqueue order, and each one replaces the pods of every deployment it
// touches before the next starts.
class RolloutQueue {
 public:
  RolloutQueue(Engine& engine, Cluster& cluster, ManifestSet live,
               Environment environment = Environment::kOnPremise);

  RolloutQueue(const RolloutQueue&) = delete;
  RolloutQueue& operator=(const RolloutQueue&) = delete;

  // Creates every deployment of the live set with resolved templates.
  void ApplyInitial();

  // Validates the live set with `change` substituted; throws
  // ValidationFailed on errors or unknown targets.
  const ConfigRevision& EnqueueChange(ConfigMapSpec change, std::string author,
                                      std::vector<std::string> targets = {});
  // Enqueues the historical snapshot of `to_revision` as a new revision.
  // Throws UnknownRevision.
  const ConfigRevision& Rollback(int to_revision, std::string author = "rollback");
  // Rolls a new image into a deployment's template, waiting for any
  // rollover already running on it.
  void UpdateImage(std::string_view deployment, std::string image);

  bool active() const { return active_.has_value(); }
  const std::optional<ConfigRevision>& active_revision() const { return active_; }
  const std::deque<ConfigRevision>& pending() const { return pending_; }
  const std::vector<ConfigRevision>& history() const { return history_; }
  std::size_t accepted() const { return static_cast<std::size_t>(next_revision_ - 1); }
  const ManifestSet& live() const { return live_; }

  // The template last rolled out for `deployment`, without the restart
  // annotation.
  const PodTemplate& ResolvedTemplate(std::string_view deployment) const;

  // `revision,tick_received,tick_applied,author,map` with header.
  std::string RenderHistoryCsv() const;

 private:
  void ProcessNext();
  void StartRollouts();
  void OnDeploymentDone();
  void Complete();
  std::vector<std::string> Affected(const ConfigRevision& rev) const;
  PodTemplate Stamp(std::string_view deployment);
  void TryImageUpdate(std::string deployment);

  Engine& engine_;
  Cluster& cluster_;
  ManifestSet live_;
  Environment environment_;
  int next_revision_ = 1;
  std::deque<ConfigRevision> pending_;
  std::optional<ConfigRevision> active_;
  std::vector<std::string> waiting_;  // affected deployments not yet started
  int outstanding_ = 0;
  std::vector<ConfigRevision> history_;
  std::map<std::string, PodTemplate, std::less<>> resolved_;
  std::map<std::string, int, std::less<>> restarts_;
};

}  // namespace meshsim

#endif  // MESHSIM_PIPELINE_H
