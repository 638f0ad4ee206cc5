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

#include "meshsim/cluster.h"

#include <algorithm>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

std::string_view PodPhaseName(PodPhase phase) {
  switch (phase) {
    case PodPhase::kPending: return "Pending";
    case PodPhase::kRunning: return "Running";
    case PodPhase::kTerminating: return "Terminating";
    case PodPhase::kGone: return "Gone";
  }
  return "Unknown";
}

std::string ScaledUpMessage(std::string_view replica_set, int n) {
  return fmt::format("Scaled up replica set {} to {}", replica_set, n);
}

std::string ScaledDownMessage(std::string_view replica_set, int n) {
  return fmt::format("Scaled down replica set {} to {}", replica_set, n);
}

std::string FormatAge(Tick age) {
  if (age < 1000) return fmt::format("{}ms", age);
  if (age < 120'000) return fmt::format("{}s", age / 1000);
  if (age < 7'200'000) return fmt::format("{}m", age / 60'000);
  return fmt::format("{}h", age / 3'600'000);
}

namespace {

std::uint32_t Fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::string Base36(int value, int width) {
  static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out(static_cast<std::size_t>(width), '0');
  for (int i = width - 1; i >= 0 && value > 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value % 36];
    value /= 36;
  }
  return out;
}

std::string JoinLabels(const Labels& labels) {
  if (labels.empty()) return "<none>";
  std::vector<std::string> parts;
  for (const auto& [k, v] : labels) parts.push_back(k + "=" + v);
  return text::Join(parts, ",");
}

std::string Field(std::string_view name, std::string_view value) {
  return fmt::format("{:<24}{}\n", std::string(name) + ":", value);
}

}  // namespace

Cluster::Cluster(Engine& engine, ClusterOptions options)
    : engine_(engine), options_(options) {}

void Cluster::ApplyService(const ServiceSpec& spec) {
  if (deployments_.contains(spec.name)) {
    throw Error(ErrorCode::kNameCollision,
                fmt::format("'{}' is already a Deployment", spec.name));
  }
  services_[spec.name] = spec.name;
}

void Cluster::ApplyDeployment(const DeploymentSpec& spec) {
  if (services_.contains(spec.name)) {
    throw Error(ErrorCode::kNameCollision,
                fmt::format("'{}' is already a Service", spec.name));
  }
  auto it = deployments_.find(spec.name);
  if (it == deployments_.end()) {
    DeploymentState state;
    state.spec = spec;
    state.created_at = engine_.now();
    auto& inserted = deployments_.emplace(spec.name, std::move(state)).first->second;
    ReplicaSet& rs = EnsureReplicaSet(spec.name, spec.pod_template);
    inserted.new_replica_set = rs.id;
    ScaleReplicaSet(inserted, rs, spec.replicas);
    return;
  }
  DeploymentState& state = it->second;
  const bool template_changed =
      replica_set(state.new_replica_set).pod_template != spec.pod_template;
  if (template_changed) {
    if (spec.replicas != state.spec.replicas && !RolloverActive(spec.name)) {
      Scale(spec.name, spec.replicas);
    }
    RollingUpdate(spec.name, spec.pod_template);
    return;
  }
  if (spec.replicas != state.spec.replicas) Scale(spec.name, spec.replicas);
}

ReplicaSet& Cluster::EnsureReplicaSet(const std::string& deployment,
                                      const PodTemplate& pod_template) {
  const std::string id = fmt::format(
      "{}-{}", deployment, Fnv1a(deployment + "\n" + CanonicalTemplate(pod_template)));
  auto it = replica_sets_.find(id);
  if (it != replica_sets_.end()) return it->second;
  ReplicaSet rs;
  rs.id = id;
  rs.deployment = deployment;
  rs.pod_template = pod_template;
  return replica_sets_.emplace(id, std::move(rs)).first->second;
}

void Cluster::Record(DeploymentState& state, std::string message) {
  engine_.Log(kControllerSource, message);
  state.events.push_back({engine_.now(), std::move(message)});
}

void Cluster::AddPod(ReplicaSet& rs) {
  Pod pod;
  pod.id = fmt::format("{}-{}", rs.id, Base36(rs.next_suffix++, 5));
  pod.deployment = rs.deployment;
  pod.replica_set = rs.id;
  pod.version = rs.pod_template.version();
  pod.created_at = engine_.now();
  const std::size_t index = pods_.size();
  pod_index_.emplace(pod.id, index);
  pods_.push_back(std::move(pod));
  engine_.ScheduleAfter(options_.startup_delay, EventKind::kPodReady,
                        [this, index] { OnPodReady(index); });
}

void Cluster::OnPodReady(std::size_t index) {
  Pod& pod = pods_[index];
  if (pod.phase != PodPhase::kPending) return;
  pod.phase = PodPhase::kRunning;
  pod.ready_at = engine_.now();
  const std::string deployment = pod.deployment;
  PublishGauges(deployment);
  auto rollover = rollovers_.find(deployment);
  if (rollover != rollovers_.end() &&
      pod.replica_set == deployments_.at(deployment).new_replica_set) {
    RolloverScaleDown(deployment);
  }
}

void Cluster::TerminatePod(std::size_t index, std::function<void()> then) {
  pods_[index].phase = PodPhase::kTerminating;
  auto finish = [this, index, then = std::move(then)] {
    pods_[index].phase = PodPhase::kGone;
    pods_[index].gone_at = engine_.now();
    PublishGauges(pods_[index].deployment);
    if (then) then();
  };
  if (options_.termination_delay == 0) {
    finish();
  } else {
    PublishGauges(pods_[index].deployment);
    engine_.ScheduleAfter(options_.termination_delay, EventKind::kPodGone,
                          std::move(finish));
  }
}

// Adjusts a replica set to `desired`, logging one scaling event. Scale-down
// removes the newest pods first.
void Cluster::ScaleReplicaSet(DeploymentState& state, ReplicaSet& rs, int desired) {
  if (desired == rs.desired) return;
  if (desired > rs.desired) {
    const int add = desired - rs.desired;
    rs.desired = desired;
    Record(state, ScaledUpMessage(rs.id, desired));
    for (int i = 0; i < add; ++i) AddPod(rs);
  } else {
    int remove = rs.desired - desired;
    rs.desired = desired;
    Record(state, ScaledDownMessage(rs.id, desired));
    for (std::size_t i = pods_.size(); i-- > 0 && remove > 0;) {
      Pod& pod = pods_[i];
      if (pod.replica_set != rs.id) continue;
      if (pod.phase == PodPhase::kGone || pod.phase == PodPhase::kTerminating) continue;
      TerminatePod(i, nullptr);
      --remove;
    }
  }
  PublishGauges(rs.deployment);
}

void Cluster::RollingUpdate(std::string_view name, const PodTemplate& pod_template,
                            std::function<void()> on_complete) {
  DeploymentState& state = MutableDeployment(name);
  if (RolloverActive(name)) {
    throw Error(ErrorCode::kUpdateInProgress,
                fmt::format("deployment '{}' is already rolling over", name));
  }
  if (replica_set(state.new_replica_set).pod_template == pod_template) {
    if (on_complete) on_complete();
    return;
  }
  const std::string key(name);
  ReplicaSet& next = EnsureReplicaSet(key, pod_template);
  state.spec.pod_template = pod_template;
  state.old_replica_set = state.new_replica_set;
  state.new_replica_set = next.id;
  Rollover rollover;
  rollover.target = state.spec.replicas;
  if (on_complete) rollover.on_complete.push_back(std::move(on_complete));
  rollovers_.emplace(key, std::move(rollover));
  engine_.Gauge("rollover.active." + key, 1);
  RolloverScaleUp(key);
}

void Cluster::RolloverScaleUp(const std::string& name) {
  DeploymentState& state = deployments_.at(name);
  ReplicaSet& next = replica_sets_.at(state.new_replica_set);
  ScaleReplicaSet(state, next, next.desired + 1);
}

void Cluster::RolloverScaleDown(const std::string& name) {
  DeploymentState& state = deployments_.at(name);
  ReplicaSet& old = replica_sets_.at(state.old_replica_set);
  const int desired = old.desired - 1;
  old.desired = desired;
  Record(state, ScaledDownMessage(old.id, desired));
  std::size_t victim = pods_.size();
  for (std::size_t i = pods_.size(); i-- > 0;) {
    const Pod& pod = pods_[i];
    if (pod.replica_set == old.id && pod.phase != PodPhase::kGone &&
        pod.phase != PodPhase::kTerminating) {
      victim = i;
      break;
    }
  }
  auto next_step = [this, name] {
    const DeploymentState& s = deployments_.at(name);
    const ReplicaSet& o = replica_sets_.at(s.old_replica_set);
    const ReplicaSet& n = replica_sets_.at(s.new_replica_set);
    if (o.desired == 0) {
      FinishRollover(name);
    } else if (n.desired < rollovers_.at(name).target) {
      RolloverScaleUp(name);
    } else {
      // Old set was larger than the target; keep draining it.
      RolloverScaleDown(name);
    }
  };
  if (victim == pods_.size()) {
    next_step();
  } else {
    TerminatePod(victim, std::move(next_step));
  }
}

void Cluster::FinishRollover(const std::string& name) {
  DeploymentState& state = deployments_.at(name);
  state.old_replica_set.clear();
  auto node = rollovers_.extract(name);
  engine_.Gauge("rollover.active." + name, 0);
  for (auto& callback : node.mapped().on_complete) {
    if (callback) callback();
  }
}

bool Cluster::RolloverActive(std::string_view name) const {
  return rollovers_.find(name) != rollovers_.end();
}

void Cluster::Scale(std::string_view name, int replicas) {
  DeploymentState& state = MutableDeployment(name);
  if (RolloverActive(name)) {
    throw Error(ErrorCode::kUpdateInProgress,
                fmt::format("cannot scale '{}' during a rollover", name));
  }
  if (replicas < 0) {
    throw Error(ErrorCode::kInvalidArgument, "replica count must be >= 0");
  }
  state.spec.replicas = replicas;
  ScaleReplicaSet(state, replica_sets_.at(state.new_replica_set), replicas);
}

int Cluster::AutoscaleTick(const AutoscalerSpec& spec, std::int64_t window_load) {
  const std::int64_t threshold = std::max(spec.threshold, 1);
  const std::int64_t wanted =
      window_load <= 0 ? 0 : (window_load + threshold - 1) / threshold;
  const int desired = static_cast<int>(
      std::clamp<std::int64_t>(wanted, spec.min, std::max(spec.min, spec.max)));
  if (HasDeployment(spec.deployment) && !RolloverActive(spec.deployment) &&
      deployment(spec.deployment).spec.replicas != desired) {
    Scale(spec.deployment, desired);
  }
  engine_.Gauge("autoscaler.desired." + spec.deployment, desired);
  return desired;
}

void Cluster::PublishGauges(const std::string& deployment) {
  engine_.Gauge("pods.running." + deployment, RunningCount(deployment));
  engine_.Gauge("pods.live." + deployment, LiveCount(deployment));
}

bool Cluster::HasDeployment(std::string_view name) const {
  return deployments_.find(name) != deployments_.end();
}

const DeploymentState& Cluster::deployment(std::string_view name) const {
  auto it = deployments_.find(name);
  if (it == deployments_.end()) {
    throw Error(ErrorCode::kNotFound, fmt::format("deployment '{}' not found", name));
  }
  return it->second;
}

DeploymentState& Cluster::MutableDeployment(std::string_view name) {
  auto it = deployments_.find(name);
  if (it == deployments_.end()) {
    throw Error(ErrorCode::kNotFound, fmt::format("deployment '{}' not found", name));
  }
  return it->second;
}

std::vector<std::string> Cluster::DeploymentNames() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : deployments_) names.push_back(name);
  return names;
}

const ReplicaSet& Cluster::replica_set(std::string_view id) const {
  auto it = replica_sets_.find(id);
  if (it == replica_sets_.end()) {
    throw Error(ErrorCode::kNotFound, fmt::format("replica set '{}' not found", id));
  }
  return it->second;
}

const Pod* Cluster::FindPod(std::string_view id) const {
  auto it = pod_index_.find(id);
  return it == pod_index_.end() ? nullptr : &pods_[it->second];
}

std::vector<const Pod*> Cluster::RunningPods(std::string_view deployment) const {
  std::vector<const Pod*> out;
  for (const auto& pod : pods_) {
    if (pod.deployment == deployment && pod.phase == PodPhase::kRunning) {
      out.push_back(&pod);
    }
  }
  return out;
}

int Cluster::RunningCount(std::string_view deployment) const {
  int n = 0;
  for (const auto& pod : pods_) {
    n += pod.deployment == deployment && pod.phase == PodPhase::kRunning;
  }
  return n;
}

int Cluster::LiveCount(std::string_view deployment) const {
  int n = 0;
  for (const auto& pod : pods_) {
    n += pod.deployment == deployment && pod.phase != PodPhase::kGone;
  }
  return n;
}

std::string Cluster::Describe(std::string_view name) const {
  const DeploymentState& state = deployment(name);
  const ReplicaSet& current = replica_set(state.new_replica_set);
  int updated = 0;
  int total = 0;
  int available = 0;
  auto live_in = [&](std::string_view rs) {
    int n = 0;
    for (const auto& pod : pods_) n += pod.replica_set == rs && pod.phase != PodPhase::kGone;
    return n;
  };
  for (const auto& pod : pods_) {
    if (pod.deployment != name || pod.phase == PodPhase::kGone) continue;
    ++total;
    updated += pod.replica_set == current.id;
    available += pod.phase == PodPhase::kRunning;
  }
  const int desired = state.spec.replicas;
  const int unavailable = std::max(0, desired - available);

  const PodTemplate& t = state.spec.pod_template;
  std::string out;
  out += Field("Name", state.spec.name);
  out += Field("Namespace", "default");
  out += Field("Labels", JoinLabels(state.spec.labels));
  out += Field("Selector",
               JoinLabels(state.spec.selector.empty() ? state.spec.labels
                                                      : state.spec.selector));
  out += Field("Replicas",
               fmt::format("{} desired | {} updated | {} total | {} available | "
                           "{} unavailable",
                           desired, updated, total, available, unavailable));
  out += Field("StrategyType", "RollingUpdate");
  out += Field("MinReadySeconds", "0");
  out += Field("RollingUpdateStrategy", "0 max unavailable, 1 max surge");
  out += "Pod Template:\n";
  out += fmt::format("  Labels:  {}\n", JoinLabels(t.labels));
  out += "  Containers:\n";
  out += fmt::format("   {}:\n", t.container_name.empty() ? state.spec.name : t.container_name);
  out += fmt::format("    Image:        {}\n", t.image.empty() ? "<none>" : t.image);
  out += fmt::format("    Port:         {}\n",
                     t.container_port ? fmt::format("{}/TCP", t.container_port) : "<none>");
  if (t.env.empty()) {
    out += "    Environment:  <none>\n";
  } else {
    out += "    Environment:\n";
    for (const auto& var : t.env) {
      if (!var.config_map.empty()) {
        out += fmt::format("      {}:  <set to the key '{}' of config map '{}'>\n",
                           var.name, var.config_key.empty() ? "*" : var.config_key,
                           var.config_map);
      } else {
        out += fmt::format("      {}:  {}\n", var.name, var.value);
      }
    }
  }
  if (state.old_replica_set.empty()) {
    out += "OldReplicaSets:  <none>\n";
  } else {
    const ReplicaSet& old = replica_set(state.old_replica_set);
    out += fmt::format("OldReplicaSets:  {} ({}/{} replicas created)\n", old.id,
                       live_in(old.id), old.desired);
  }
  out += fmt::format("NewReplicaSet:   {} ({}/{} replicas created)\n", current.id,
                     live_in(current.id), current.desired);
  out += "Events:\n";
  std::size_t age_width = 6;
  for (const auto& e : state.events) {
    age_width = std::max(age_width, FormatAge(engine_.now() - e.tick).size() + 2);
  }
  out += fmt::format("  {:<8}{:<19}{:<{}}{:<23}{}\n", "Type", "Reason", "Age",
                     age_width, "From", "Message");
  out += fmt::format("  {:<8}{:<19}{:<{}}{:<23}{}\n", "----", "------", "---",
                     age_width, "----", "-------");
  for (const auto& e : state.events) {
    out += fmt::format("  {:<8}{:<19}{:<{}}{:<23}{}\n", ScalingEvent::kType,
                       ScalingEvent::kReason, FormatAge(engine_.now() - e.tick),
                       age_width, ScalingEvent::kFrom, e.message);
  }
  return out;
}

std::string Cluster::ListPods() const {
  struct Row {
    std::string name, ready, status, restarts, age;
  };
  std::vector<Row> rows{{"NAME", "READY", "STATUS", "RESTARTS", "AGE"}};
  for (const auto& pod : pods_) {
    if (pod.phase == PodPhase::kGone) continue;
    rows.push_back({pod.id, pod.phase == PodPhase::kRunning ? "1/1" : "0/1",
                    std::string(PodPhaseName(pod.phase)), "0",
                    FormatAge(engine_.now() - pod.created_at)});
  }
  std::size_t w[4] = {0, 0, 0, 0};
  for (const auto& r : rows) {
    w[0] = std::max(w[0], r.name.size());
    w[1] = std::max(w[1], r.ready.size());
    w[2] = std::max(w[2], r.status.size());
    w[3] = std::max(w[3], r.restarts.size());
  }
  std::string out;
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}   {:<{}}   {:<{}}   {:<{}}   {}\n", r.name, w[0],
                       r.ready, w[1], r.status, w[2], r.restarts, w[3], r.age);
  }
  return out;
}

}  // namespace meshsim
