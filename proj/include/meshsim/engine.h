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

#ifndef MESHSIM_ENGINE_H
#define MESHSIM_ENGINE_H

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace meshsim {

// Logical time. One tick is one millisecond of simulated time.
using Tick = std::int64_t;

inline constexpr Tick kDefaultMaxTicks = 10'000'000;

enum class EventKind {
  kPodReady,
  kPodGone,
  kRolloverStep,
  kRequestArrival,
  kTryComplete,
  kAutoscaleWindow,
  kDirective,
  kCallStep,
  kCustom,
};

std::string_view EventKindName(EventKind kind);

struct SimEvent {
  Tick tick = 0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kCustom;
  std::function<void()> action;
};

struct TraceEntry {
  Tick tick = 0;
  std::string source;
  std::string message;

  bool operator==(const TraceEntry&) const = default;
};

struct MetricSample {
  Tick tick = 0;
  std::string name;
  double value = 0;

  bool operator==(const MetricSample&) const = default;
};

// Append-only record of a run. Entries are sorted by tick because they are
// only ever appended at the engine's current clock.
class Trace {
 public:
  void Append(Tick tick, std::string source, std::string message);
  void Sample(Tick tick, std::string name, double value);

  const std::vector<TraceEntry>& entries() const { return entries_; }
  const std::vector<MetricSample>& metrics() const { return metrics_; }

  std::vector<TraceEntry> EntriesFrom(std::string_view source) const;
  std::vector<MetricSample> SamplesOf(std::string_view name) const;

  // `<tick>\t<source>\t<message>` per line.
  std::string RenderText() const;
  // `tick,name,value` with header.
  std::string RenderMetricsCsv() const;

  bool operator==(const Trace&) const = default;

 private:
  std::vector<TraceEntry> entries_;
  std::vector<MetricSample> metrics_;
};

struct EngineOptions {
  Tick max_ticks = kDefaultMaxTicks;
  std::uint64_t seed = 0;
};

// Single-threaded discrete-event kernel. Events run in (tick, sequence)
// order; sequence numbers are handed out at scheduling time.
class Engine {
 public:
  using StopPredicate = std::function<bool(Tick)>;

  explicit Engine(EngineOptions options = {});

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Tick now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  const EngineOptions& options() const { return options_; }

  // Throws PastEvent when `tick` is earlier than the clock.
  std::uint64_t Schedule(Tick tick, EventKind kind,
                         std::function<void()> action);
  std::uint64_t ScheduleAfter(Tick delay, EventKind kind,
                              std::function<void()> action);

  // Executes events until `stop` holds or the queue drains. Throws Livelock
  // when the next event lies beyond max_ticks.
  const Trace& RunUntil(const StopPredicate& stop);
  const Trace& Run();

  void Log(std::string_view source, std::string message);
  // Gauges are recorded only when their value changes.
  void Gauge(std::string_view name, double value);
  void Count(std::string_view name, double delta = 1);
  double counter(std::string_view name) const;

  // Invoked after every executed event; used by invariant checkers.
  void SetPostEventHook(std::function<void()> hook) {
    post_event_hook_ = std::move(hook);
  }

  std::mt19937_64& rng() { return rng_; }

  const Trace& trace() const { return trace_; }
  Trace TakeTrace() { return std::move(trace_); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.tick != b.tick) return a.tick > b.tick;
      return a.sequence > b.sequence;
    }
  };

  EngineOptions options_;
  Tick now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  Trace trace_;
  std::map<std::string, double, std::less<>> gauges_;
  std::map<std::string, double, std::less<>> counters_;
  std::function<void()> post_event_hook_;
  std::mt19937_64 rng_;
};

}  // namespace meshsim

#endif  // MESHSIM_ENGINE_H
