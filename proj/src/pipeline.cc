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

#include "meshsim/pipeline.h"

#include <algorithm>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

namespace {

const ConfigMapSpec* FindMap(const std::vector<ConfigMapSpec>& maps, std::string_view name) {
  for (const auto& m : maps) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::string RenderMap(const ConfigMapSpec& map) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : map.entries) parts.push_back(k + "=" + v);
  return text::Join(parts, ";");
}

std::string Lookup(std::string_view ref, const std::vector<ConfigMapSpec>& maps) {
  const std::size_t dot = ref.find('.');
  if (dot != std::string_view::npos) {
    const std::string_view map_name = ref.substr(0, dot);
    const std::string_view key = ref.substr(dot + 1);
    const ConfigMapSpec* map = FindMap(maps, map_name);
    if (map == nullptr) {
      throw Error(ErrorCode::kUnknownMap, fmt::format("config map '{}' is not defined", map_name));
    }
    auto it = map->entries.find(std::string(key));
    if (it == map->entries.end()) {
      throw Error(ErrorCode::kUnknownKey,
                  fmt::format("config map '{}' has no key '{}'", map_name, key));
    }
    return it->second;
  }
  const std::string key(ref);
  std::vector<const ConfigMapSpec*> defining;
  for (const auto& m : maps) {
    if (m.entries.contains(key)) defining.push_back(&m);
  }
  if (defining.empty()) {
    throw Error(ErrorCode::kUnknownKey, fmt::format("no config map defines '{}'", key));
  }
  if (defining.size() > 1) {
    std::vector<std::string> names;
    for (const auto* m : defining) names.push_back(m->name);
    throw Error(ErrorCode::kAmbiguousKey,
                fmt::format("'{}' is defined by {}; qualify it as ${{map.{}}}", key,
                            text::Join(names, " and "), key));
  }
  return defining.front()->entries.at(key);
}

}  // namespace

std::string Dereference(std::string_view value, const std::vector<ConfigMapSpec>& maps) {
  std::string out;
  std::size_t pos = 0;
  while (pos < value.size()) {
    const std::size_t open = value.find("${", pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = value.find('}', open + 2);
    if (close == std::string_view::npos) break;
    out.append(value.substr(pos, open - pos));
    out += Lookup(text::Trim(value.substr(open + 2, close - open - 2)), maps);
    pos = close + 1;
  }
  out.append(value.substr(pos));
  return out;
}

PodTemplate ResolveTemplate(const PodTemplate& pod_template,
                            const std::vector<ConfigMapSpec>& maps) {
  PodTemplate t = pod_template;
  for (auto& var : t.env) {
    if (!var.config_map.empty()) {
      const ConfigMapSpec* map = FindMap(maps, var.config_map);
      if (map == nullptr) {
        throw Error(ErrorCode::kUnknownMap,
                    fmt::format("config map '{}' is not defined", var.config_map));
      }
      if (var.config_key.empty()) {
        var.value = RenderMap(*map);
      } else {
        var.value = Lookup(var.config_map + "." + var.config_key, maps);
      }
      var.config_map.clear();
      var.config_key.clear();
    } else {
      var.value = Dereference(var.value, maps);
    }
  }
  for (const auto& name : t.env_from) {
    const ConfigMapSpec* map = FindMap(maps, name);
    if (map == nullptr) {
      throw Error(ErrorCode::kUnknownMap, fmt::format("config map '{}' is not defined", name));
    }
    for (const auto& [k, v] : map->entries) t.env.push_back({k, v, {}, {}});
  }
  t.env_from.clear();
  return t;
}

RolloutQueue::RolloutQueue(Engine& engine, Cluster& cluster, ManifestSet live,
                           Environment environment)
    : engine_(engine), cluster_(cluster), live_(std::move(live)), environment_(environment) {}

void RolloutQueue::ApplyInitial() {
  for (const auto& d : live_.deployments) {
    DeploymentSpec spec = d;
    spec.pod_template = ResolveTemplate(d.pod_template, live_.config_maps);
    resolved_[d.name] = spec.pod_template;
    cluster_.ApplyDeployment(spec);
  }
}

const PodTemplate& RolloutQueue::ResolvedTemplate(std::string_view deployment) const {
  auto it = resolved_.find(deployment);
  if (it == resolved_.end()) {
    throw Error(ErrorCode::kNotFound,
                fmt::format("deployment '{}' has not been rolled out", deployment));
  }
  return it->second;
}

const ConfigRevision& RolloutQueue::EnqueueChange(ConfigMapSpec change, std::string author,
                                                  std::vector<std::string> targets) {
  ManifestSet candidate = live_;
  auto it = std::find_if(candidate.config_maps.begin(), candidate.config_maps.end(),
                         [&](const auto& m) { return m.name == change.name; });
  if (it == candidate.config_maps.end()) {
    candidate.config_maps.push_back(change);
  } else {
    *it = change;
  }
  ValidationReport report = Validate(candidate, environment_);
  for (const auto& t : targets) {
    if (candidate.FindDeployment(t) == nullptr) {
      report.findings.push_back({Severity::kError, "UnknownDeployment",
                                 fmt::format("change targets undefined deployment '{}'", t),
                                 "ConfigMap", change.name});
    }
  }
  if (!report.ok()) {
    std::vector<std::string> errors;
    for (const auto& f : report.findings) {
      if (f.severity == Severity::kError) errors.push_back(f.Render());
    }
    throw Error(ErrorCode::kValidationFailed,
                fmt::format("change to '{}' rejected: {}", change.name,
                            text::Join(errors, "; ")));
  }
  ConfigRevision rev;
  rev.revision = next_revision_++;
  rev.configmap = std::move(change);
  rev.author = std::move(author);
  rev.received_at = engine_.now();
  rev.targets = std::move(targets);
  engine_.Log(kPipelineSource, fmt::format("revision {} received: {} by {}", rev.revision,
                                           rev.configmap.name, rev.author));
  pending_.push_back(std::move(rev));
  const ConfigRevision& ref = pending_.back();
  const int number = ref.revision;
  if (!active_) ProcessNext();
  if (active_ && active_->revision == number) return *active_;
  for (const auto& h : history_) {
    if (h.revision == number) return h;
  }
  for (const auto& p : pending_) {
    if (p.revision == number) return p;
  }
  throw Error(ErrorCode::kNotFound, "revision vanished");
}

const ConfigRevision& RolloutQueue::Rollback(int to_revision, std::string author) {
  auto it = std::find_if(history_.begin(), history_.end(),
                         [&](const auto& r) { return r.revision == to_revision; });
  if (it == history_.end()) {
    throw Error(ErrorCode::kUnknownRevision,
                fmt::format("revision {} is not in the history", to_revision));
  }
  ConfigMapSpec snapshot = it->configmap;
  std::vector<std::string> targets = it->targets;
  const ConfigRevision& rev = EnqueueChange(std::move(snapshot), std::move(author),
                                            std::move(targets));
  const int number = rev.revision;
  auto tag = [&](ConfigRevision& r) {
    if (r.revision == number) r.rollback_of = to_revision;
  };
  if (active_) tag(*active_);
  for (auto& r : pending_) tag(r);
  for (auto& r : history_) tag(r);
  return rev;
}

std::vector<std::string> RolloutQueue::Affected(const ConfigRevision& rev) const {
  if (!rev.targets.empty()) {
    std::vector<std::string> out = rev.targets;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<std::string> out;
  for (const auto& d : live_.deployments) {
    const auto refs = d.pod_template.ConfigMapRefs();
    if (std::find(refs.begin(), refs.end(), rev.configmap.name) != refs.end()) {
      out.push_back(d.name);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PodTemplate RolloutQueue::Stamp(std::string_view deployment) {
  const DeploymentSpec* spec = live_.FindDeployment(deployment);
  if (spec == nullptr) {
    throw Error(ErrorCode::kNotFound, fmt::format("deployment '{}' not found", deployment));
  }
  PodTemplate t = ResolveTemplate(spec->pod_template, live_.config_maps);
  resolved_[std::string(deployment)] = t;
  auto it = restarts_.find(deployment);
  if (it != restarts_.end()) {
    t.annotations[std::string(kRevisionAnnotation)] = std::to_string(it->second);
  }
  return t;
}

void RolloutQueue::ProcessNext() {
  if (active_ || pending_.empty()) return;
  active_ = std::move(pending_.front());
  pending_.pop_front();
  auto it = std::find_if(live_.config_maps.begin(), live_.config_maps.end(),
                         [&](const auto& m) { return m.name == active_->configmap.name; });
  if (it == live_.config_maps.end()) {
    live_.config_maps.push_back(active_->configmap);
  } else {
    *it = active_->configmap;
  }
  waiting_ = Affected(*active_);
  outstanding_ = static_cast<int>(waiting_.size());
  engine_.Log(kPipelineSource,
              fmt::format("revision {} started: {} deployment(s)", active_->revision,
                          waiting_.size()));
  for (const auto& d : waiting_) restarts_[d] = active_->revision;
  if (waiting_.empty()) {
    Complete();
    return;
  }
  StartRollouts();
}

void RolloutQueue::StartRollouts() {
  if (!active_) return;
  const int revision = active_->revision;
  std::vector<std::string> todo = std::move(waiting_);
  waiting_.clear();
  std::vector<std::string> busy;
  for (const auto& name : todo) {
    if (!cluster_.HasDeployment(name)) {
      // Nothing runs it yet; the new content applies when it is created.
      Stamp(name);
      --outstanding_;
      continue;
    }
    if (cluster_.RolloverActive(name)) {
      busy.push_back(name);
      continue;
    }
    cluster_.RollingUpdate(name, Stamp(name), [this] { OnDeploymentDone(); });
  }
  if (active_ && active_->revision == revision && outstanding_ == 0) {
    Complete();
    return;
  }
  // A synchronous completion may already have moved on to a later revision.
  if (busy.empty() || !active_ || active_->revision != revision) return;
  waiting_ = std::move(busy);
  engine_.ScheduleAfter(1, EventKind::kRolloverStep, [this, revision] {
    if (active_ && active_->revision == revision) StartRollouts();
  });
}

void RolloutQueue::OnDeploymentDone() {
  if (--outstanding_ == 0) Complete();
}

void RolloutQueue::Complete() {
  active_->applied_at = engine_.now();
  engine_.Log(kPipelineSource, fmt::format("revision {} applied", active_->revision));
  history_.push_back(std::move(*active_));
  active_.reset();
  ProcessNext();
}

void RolloutQueue::UpdateImage(std::string_view deployment, std::string image) {
  auto it = std::find_if(live_.deployments.begin(), live_.deployments.end(),
                         [&](const auto& d) { return d.name == deployment; });
  if (it == live_.deployments.end()) {
    throw Error(ErrorCode::kNotFound, fmt::format("deployment '{}' not found", deployment));
  }
  it->pod_template.image = std::move(image);
  TryImageUpdate(std::string(deployment));
}

void RolloutQueue::TryImageUpdate(std::string deployment) {
  if (cluster_.RolloverActive(deployment)) {
    engine_.ScheduleAfter(1, EventKind::kRolloverStep,
                          [this, deployment] { TryImageUpdate(deployment); });
    return;
  }
  cluster_.RollingUpdate(deployment, Stamp(deployment));
}

std::string RolloutQueue::RenderHistoryCsv() const {
  std::string out = "revision,tick_received,tick_applied,author,map\n";
  for (const auto& r : history_) {
    out += fmt::format("{},{},{},{},{}\n", r.revision, r.received_at, r.applied_at, r.author,
                       r.configmap.name);
  }
  return out;
}

}  // namespace meshsim
