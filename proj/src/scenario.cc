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

#include "meshsim/scenario.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "meshsim/pipeline.h"
#include "text.h"

namespace meshsim {

namespace {

constexpr std::string_view kScenarioSource = "scenario";

[[noreturn]] void Fail(int line, std::string_view message) {
  throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", line, message));
}

Tick ParseTick(std::string_view s, int line) {
  try {
    return text::ParseInt(s, "tick");
  } catch (const Error&) {
    Fail(line, fmt::format("expected a tick, got '{}'", s));
  }
}

// Removes a trailing `at [tick] T` and returns T.
std::optional<Tick> TakeAt(std::vector<std::string>& tokens, int line) {
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i] != "at") continue;
    std::size_t j = i + 1;
    if (j < tokens.size() && tokens[j] == "tick") ++j;
    if (j + 1 != tokens.size()) Fail(line, "expected 'at [tick] <n>' at the end");
    const Tick t = ParseTick(tokens[j], line);
    tokens.resize(i);
    return t;
  }
  return std::nullopt;
}

// `--name=value` or `--name value`.
std::map<std::string, std::string> TakeFlags(const std::vector<std::string>& tokens,
                                             std::size_t start, int line) {
  std::map<std::string, std::string> flags;
  for (std::size_t i = start; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (!text::StartsWith(t, "--")) Fail(line, fmt::format("unexpected '{}'", t));
    const std::size_t eq = t.find('=');
    if (eq != std::string::npos) {
      flags[t.substr(2, eq - 2)] = t.substr(eq + 1);
    } else if (i + 1 < tokens.size()) {
      flags[t.substr(2)] = tokens[++i];
    } else {
      Fail(line, fmt::format("flag '{}' needs a value", t));
    }
  }
  return flags;
}

std::string StripComment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

std::string ResolvePath(const std::string& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return path;
  return (std::filesystem::path(base) / p).string();
}

}  // namespace

Scenario ParseScenario(std::string_view source, std::string base_dir) {
  Scenario sc;
  sc.base_dir = std::move(base_dir);
  Tick last = 0;
  auto order = [&](Tick t, int line) {
    if (t < last) {
      Fail(line, fmt::format("tick {} is earlier than the previous directive at {}", t, last));
    }
    last = t;
  };
  const auto lines = text::SplitLines(source);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line = static_cast<int>(n + 1);
    std::vector<std::string> tok = text::SplitWhitespace(StripComment(lines[n]));
    if (tok.empty()) continue;
    const std::string verb = tok[0];
    auto need = [&](std::size_t count) {
      if (tok.size() < count) Fail(line, fmt::format("'{}' needs more arguments", verb));
    };
    try {
      if (verb == "manifest") {
        need(2);
        for (std::size_t i = 1; i < tok.size(); ++i) sc.manifests.push_back(tok[i]);
      } else if (verb == "environment") {
        need(2);
        sc.environment = ParseEnvironment(tok[1]);
      } else if (verb == "seed") {
        need(2);
        sc.seed = static_cast<std::uint64_t>(text::ParseInt(tok[1], "seed"));
      } else if (verb == "startup-delay") {
        need(2);
        sc.cluster.startup_delay = ParseTick(tok[1], line);
        if (sc.cluster.startup_delay < 1) Fail(line, "startup-delay must be >= 1");
      } else if (verb == "termination-delay") {
        need(2);
        sc.cluster.termination_delay = ParseTick(tok[1], line);
        if (sc.cluster.termination_delay < 0) Fail(line, "termination-delay must be >= 0");
      } else if (verb == "service-time") {
        need(2);
        if (tok.size() == 2) {
          sc.default_service_time = ParseTick(tok[1], line);
        } else {
          sc.service_times.emplace_back(tok[1], ParseTick(tok[2], line));
        }
      } else if (verb == "autoscale") {
        need(3);
        if (tok[1] != "deployment") Fail(line, "expected 'autoscale deployment <name>'");
        AutoscalerSpec as;
        as.name = tok[2] + "-autoscaler";
        as.deployment = tok[2];
        for (const auto& [k, v] : TakeFlags(tok, 3, line)) {
          const int value = static_cast<int>(text::ParseInt(v, k));
          if (k == "min") {
            as.min = value;
          } else if (k == "max") {
            as.max = value;
          } else if (k == "threshold") {
            as.threshold = value;
          } else {
            Fail(line, fmt::format("unknown autoscale flag '--{}'", k));
          }
        }
        sc.autoscalers.push_back(std::move(as));
      } else if (verb == "load") {
        need(7);
        LoadProfile p;
        p.host = tok[1];
        p.rps = text::ParseDouble(tok[2], "rps");
        if (tok[3] != "from" || tok[5] != "to") Fail(line, "expected 'from <t0> to <t1>'");
        p.from = ParseTick(tok[4], line);
        p.to = ParseTick(tok[6], line);
        if (p.rps <= 0 || p.to < p.from) Fail(line, "load needs rps > 0 and t1 >= t0");
        for (std::size_t i = 7; i < tok.size(); i += 2) {
          if (i + 1 >= tok.size()) Fail(line, fmt::format("'{}' needs a value", tok[i]));
          const std::string& v = tok[i + 1];
          if (tok[i] == "class") {
            p.klass = ParseRequestClass(v);
          } else if (tok[i] == "via") {
            p.entrypoint = ParseEntrypoint(v);
          } else if (tok[i] == "cookie") {
            p.cookie = v;
          } else if (tok[i] == "jitter") {
            p.jitter = ParseTick(v, line);
          } else {
            Fail(line, fmt::format("unknown load option '{}'", tok[i]));
          }
        }
        order(p.from, line);
        sc.loads.push_back(std::move(p));
      } else if (verb == "requests") {
        need(2);
        sc.request_files.push_back(tok[1]);
      } else if (verb == "update-image" || verb == "config-change" || verb == "rollback" ||
                 verb == "describe") {
        Directive d;
        d.line = line;
        d.at = TakeAt(tok, line).value_or(last);
        if (verb == "update-image") {
          need(3);
          if (tok.size() != 3) Fail(line, "expected 'update-image <deployment> <image>'");
          d.kind = DirectiveKind::kUpdateImage;
          d.target = tok[1];
          d.value = tok[2];
        } else if (verb == "config-change") {
          need(3);
          d.kind = DirectiveKind::kConfigChange;
          d.target = tok[1];
          const std::size_t eq = tok[2].find('=');
          if (eq == std::string::npos || eq == 0) Fail(line, "expected <key>=<value>");
          d.key = tok[2].substr(0, eq);
          d.value = tok[2].substr(eq + 1);
          d.author = "scenario";
          if (tok.size() == 5 && tok[3] == "by") {
            d.author = tok[4];
          } else if (tok.size() != 3) {
            Fail(line, "expected 'config-change <map> <key>=<value> [by <author>]'");
          }
        } else if (verb == "rollback") {
          need(2);
          if (tok.size() != 2) Fail(line, "expected 'rollback <revision>'");
          d.kind = DirectiveKind::kRollback;
          d.revision = static_cast<int>(text::ParseInt(tok[1], "revision"));
        } else {
          need(2);
          if (tok.size() != 2) Fail(line, "expected 'describe <deployment>'");
          d.kind = DirectiveKind::kDescribe;
          d.target = tok[1];
        }
        order(d.at, line);
        sc.timeline.push_back(std::move(d));
      } else if (verb == "stop") {
        need(2);
        if (tok[1] == "at") {
          std::vector<std::string> rest = tok;
          const auto t = TakeAt(rest, line);
          if (!t || rest.size() != 1) Fail(line, "expected 'stop at <tick>'");
          sc.stop = StopKind::kAtTick;
          sc.stop_at = *t;
        } else if (tok.size() == 3 && tok[1] == "when" && tok[2] == "idle") {
          sc.stop = StopKind::kIdle;
        } else if (tok.size() == 3 && tok[1] == "when" && tok[2] == "rollout-complete") {
          sc.stop = StopKind::kRolloutComplete;
        } else {
          Fail(line, "expected 'stop at <tick>', 'stop when idle' or "
                     "'stop when rollout-complete'");
        }
      } else {
        Fail(line, fmt::format("unknown directive '{}'", verb));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError && text::StartsWith(e.message(), "line ")) throw;
      Fail(line, e.message());
    }
  }
  return sc;
}

Scenario LoadScenario(const std::string& path) {
  const std::filesystem::path p(path);
  return ParseScenario(text::ReadFile(path), p.parent_path().string());
}

namespace {

// Generates evenly spaced arrivals for one load profile, one event at a
// time so the queue stays small.
class LoadDriver {
 public:
  LoadDriver(Engine& engine, Mesh& mesh, LoadProfile profile)
      : engine_(engine), mesh_(mesh), profile_(std::move(profile)) {}

  void Start() { ScheduleNext(); }

 private:
  void ScheduleNext() {
    const Tick t = profile_.from +
                   static_cast<Tick>(std::floor(static_cast<double>(index_) * 1000.0 /
                                                    profile_.rps +
                                                1e-9));
    if (t >= profile_.to) return;
    ++index_;
    engine_.Schedule(t, EventKind::kRequestArrival, [this] {
      if (profile_.jitter > 0) {
        std::uniform_int_distribution<Tick> dist(0, profile_.jitter);
        engine_.ScheduleAfter(dist(engine_.rng()), EventKind::kRequestArrival,
                              [this] { Fire(); });
      } else {
        Fire();
      }
      ScheduleNext();
    });
  }

  void Fire() {
    Request r;
    r.target_host = profile_.host;
    r.klass = profile_.klass;
    r.entrypoint = profile_.entrypoint;
    if (!profile_.cookie.empty()) r.headers["cookie"] = profile_.cookie;
    mesh_.Submit(std::move(r));
  }

  Engine& engine_;
  Mesh& mesh_;
  LoadProfile profile_;
  std::int64_t index_ = 0;
};

ConfigMapSpec LatestMap(const RolloutQueue& queue, const std::string& name) {
  for (auto it = queue.pending().rbegin(); it != queue.pending().rend(); ++it) {
    if (it->configmap.name == name) return it->configmap;
  }
  if (queue.active_revision() && queue.active_revision()->configmap.name == name) {
    return queue.active_revision()->configmap;
  }
  if (const ConfigMapSpec* live = queue.live().FindConfigMap(name)) return *live;
  ConfigMapSpec fresh;
  fresh.api_version = "v1";
  fresh.name = name;
  return fresh;
}

}  // namespace

SimulationResult RunScenario(const Scenario& sc, const RunOptions& options) {
  SimulationResult result;
  ManifestSet set;
  for (const auto& path : sc.manifests) set.Merge(LoadManifestFile(ResolvePath(sc.base_dir, path)));
  for (const auto& source : sc.manifest_texts) set.Merge(ParseManifest(source));
  {
    ManifestSet extra;
    extra.autoscalers = sc.autoscalers;
    set.Merge(extra);
  }
  result.validation = Validate(set, sc.environment);
  const RoutingTable table = RoutingTable::Build(set);
  for (const auto& load : sc.loads) {
    if (table.Routes(load.host) == nullptr && !table.IsExternal(load.host)) {
      result.validation.findings.push_back(
          {Severity::kError, "UnknownHost",
           fmt::format("load targets host '{}' that no manifest defines", load.host),
           "Scenario", load.host});
    }
  }
  for (const auto& d : sc.timeline) {
    if ((d.kind == DirectiveKind::kUpdateImage || d.kind == DirectiveKind::kDescribe) &&
        set.FindDeployment(d.target) == nullptr) {
      result.validation.findings.push_back(
          {Severity::kError, "UnknownDeployment",
           fmt::format("line {} names undefined deployment '{}'", d.line, d.target),
           "Scenario", d.target});
    }
  }
  if (!result.validation.ok()) return result;
  result.ran = true;

  Engine engine({options.max_ticks, options.seed.value_or(sc.seed)});
  Cluster cluster(engine, sc.cluster);
  for (const auto& svc : set.services) cluster.ApplyService(svc);
  RolloutQueue queue(engine, cluster, set, sc.environment);
  queue.ApplyInitial();

  ClusterPodSource pods(cluster, set.services);
  ServiceTimeProfile profile(sc.default_service_time);
  for (const auto& [name, t] : sc.service_times) {
    if (set.FindDeployment(name) != nullptr) {
      profile.SetForDeployment(name, t);
    } else {
      profile.SetForPod(name, t);
    }
  }
  Mesh mesh(engine, table, pods, profile);

  std::vector<std::unique_ptr<LoadDriver>> drivers;
  for (const auto& load : sc.loads) {
    drivers.push_back(std::make_unique<LoadDriver>(engine, mesh, load));
    drivers.back()->Start();
  }
  for (const auto& file : sc.request_files) {
    for (auto& r : ParseRequestsCsv(text::ReadFile(ResolvePath(sc.base_dir, file)))) {
      const Tick at = r.issued_at;
      engine.Schedule(at, EventKind::kRequestArrival,
                      [&mesh, r = std::move(r)]() mutable { mesh.Submit(std::move(r)); });
    }
  }

  bool stopped = false;
  std::function<void()> window;
  if (!set.autoscalers.empty()) {
    window = [&] {
      for (const auto& as : set.autoscalers) {
        cluster.AutoscaleTick(as, mesh.TakeWindowLoad(as.deployment));
      }
      if (!stopped && engine.pending() > 0) {
        engine.ScheduleAfter(kAutoscaleWindow, EventKind::kAutoscaleWindow, window);
      }
    };
    engine.Schedule(kAutoscaleWindow, EventKind::kAutoscaleWindow, window);
  }

  std::size_t remaining = sc.timeline.size();
  for (const auto& d : sc.timeline) {
    engine.Schedule(d.at, EventKind::kDirective, [&, d] {
      --remaining;
      try {
        switch (d.kind) {
          case DirectiveKind::kUpdateImage:
            queue.UpdateImage(d.target, d.value);
            break;
          case DirectiveKind::kConfigChange: {
            ConfigMapSpec map = LatestMap(queue, d.target);
            map.entries[d.key] = d.value;
            queue.EnqueueChange(std::move(map), d.author);
            break;
          }
          case DirectiveKind::kRollback:
            queue.Rollback(d.revision, "rollback");
            break;
          case DirectiveKind::kDescribe:
            result.snapshots.push_back({engine.now(), d.target, cluster.Describe(d.target)});
            break;
        }
      } catch (const Error& e) {
        const std::string note = fmt::format("line {}: {}", d.line, e.what());
        engine.Log(kScenarioSource, "rejected " + note);
        result.rejected.push_back(note);
      }
    });
  }

  const std::optional<Tick> stop_at =
      options.stop_at ? options.stop_at
                      : (sc.stop == StopKind::kAtTick ? std::optional<Tick>(sc.stop_at)
                                                      : std::nullopt);
  if (stop_at) {
    engine.Schedule(*stop_at, EventKind::kCustom, [&] { stopped = true; });
  }
  if (options.observer) {
    engine.SetPostEventHook([&] { options.observer(engine, cluster); });
  }
  const bool until_rollout = !stop_at && sc.stop == StopKind::kRolloutComplete;
  engine.RunUntil([&](Tick) {
    if (stopped) return true;
    if (!until_rollout || remaining > 0 || queue.active() || !queue.pending().empty()) {
      return false;
    }
    for (const auto& name : cluster.DeploymentNames()) {
      if (cluster.RolloverActive(name)) return false;
    }
    return true;
  });

  result.end_tick = engine.now();
  for (const auto& name : cluster.DeploymentNames()) {
    result.describe += cluster.Describe(name);
    result.describe += "\n";
    result.running[name] = cluster.RunningCount(name);
  }
  result.pods = cluster.ListPods();
  result.history_csv = queue.RenderHistoryCsv();
  result.outcomes = mesh.outcomes();
  result.trace = engine.TakeTrace();
  return result;
}

void WriteArtifacts(const SimulationResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("cannot create '{}': {}", dir, ec.message()));
  }
  const std::filesystem::path base(dir);
  text::WriteFile((base / "trace.txt").string(), result.trace.RenderText());
  text::WriteFile((base / "metrics.csv").string(), result.trace.RenderMetricsCsv());
  text::WriteFile((base / "outcomes.csv").string(), RenderOutcomesCsv(result.outcomes));
  text::WriteFile((base / "history.csv").string(), result.history_csv);
  std::string describe;
  for (const auto& s : result.snapshots) {
    describe += fmt::format("# {} at tick {}\n{}\n", s.deployment, s.tick, s.text);
  }
  describe += fmt::format("# final state at tick {}\n{}", result.end_tick, result.describe);
  text::WriteFile((base / "describe.txt").string(), describe);
  text::WriteFile((base / "pods.txt").string(), result.pods);
}

}  // namespace meshsim
