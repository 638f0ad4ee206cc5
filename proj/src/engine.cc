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

#include "meshsim/engine.h"

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kPodReady: return "PodReady";
    case EventKind::kPodGone: return "PodGone";
    case EventKind::kRolloverStep: return "RolloverStep";
    case EventKind::kRequestArrival: return "RequestArrival";
    case EventKind::kTryComplete: return "TryComplete";
    case EventKind::kAutoscaleWindow: return "AutoscaleWindow";
    case EventKind::kDirective: return "Directive";
    case EventKind::kCallStep: return "CallStep";
    case EventKind::kCustom: return "Custom";
  }
  return "Unknown";
}

void Trace::Append(Tick tick, std::string source, std::string message) {
  entries_.push_back({tick, std::move(source), std::move(message)});
}

void Trace::Sample(Tick tick, std::string name, double value) {
  metrics_.push_back({tick, std::move(name), value});
}

std::vector<TraceEntry> Trace::EntriesFrom(std::string_view source) const {
  std::vector<TraceEntry> out;
  for (const auto& e : entries_) {
    if (e.source == source) out.push_back(e);
  }
  return out;
}

std::vector<MetricSample> Trace::SamplesOf(std::string_view name) const {
  std::vector<MetricSample> out;
  for (const auto& m : metrics_) {
    if (m.name == name) out.push_back(m);
  }
  return out;
}

std::string Trace::RenderText() const {
  std::string out;
  for (const auto& e : entries_) {
    out += fmt::format("{}\t{}\t{}\n", e.tick, e.source, e.message);
  }
  return out;
}

std::string Trace::RenderMetricsCsv() const {
  std::string out = "tick,name,value\n";
  for (const auto& m : metrics_) {
    out += fmt::format("{},{},{}\n", m.tick, m.name, text::FormatNumber(m.value));
  }
  return out;
}

Engine::Engine(EngineOptions options)
    : options_(options), rng_(options.seed) {}

std::uint64_t Engine::Schedule(Tick tick, EventKind kind,
                               std::function<void()> action) {
  if (tick < now_) {
    throw Error(ErrorCode::kPastEvent,
                fmt::format("{} event at tick {} precedes clock {}",
                            EventKindName(kind), tick, now_));
  }
  const std::uint64_t sequence = next_sequence_++;
  queue_.push(SimEvent{tick, sequence, kind, std::move(action)});
  return sequence;
}

std::uint64_t Engine::ScheduleAfter(Tick delay, EventKind kind,
                                    std::function<void()> action) {
  return Schedule(now_ + delay, kind, std::move(action));
}

const Trace& Engine::RunUntil(const StopPredicate& stop) {
  while (!(stop && stop(now_)) && !queue_.empty()) {
    if (queue_.top().tick > options_.max_ticks) {
      throw Error(ErrorCode::kLivelock,
                  fmt::format("next event at tick {} exceeds budget of {} "
                              "ticks",
                              queue_.top().tick, options_.max_ticks));
    }
    // priority_queue::top is const; the event is copied out before pop.
    SimEvent event = queue_.top();
    queue_.pop();
    now_ = event.tick;
    if (event.action) event.action();
    if (post_event_hook_) post_event_hook_();
  }
  return trace_;
}

const Trace& Engine::Run() { return RunUntil(nullptr); }

void Engine::Log(std::string_view source, std::string message) {
  trace_.Append(now_, std::string(source), std::move(message));
}

void Engine::Gauge(std::string_view name, double value) {
  auto it = gauges_.find(name);
  if (it != gauges_.end() && it->second == value) return;
  if (it == gauges_.end()) {
    gauges_.emplace(std::string(name), value);
  } else {
    it->second = value;
  }
  trace_.Sample(now_, std::string(name), value);
}

void Engine::Count(std::string_view name, double delta) {
  auto it = counters_.find(name);
  if (it == counters_.end()) {
    it = counters_.emplace(std::string(name), 0.0).first;
  }
  it->second += delta;
}

double Engine::counter(std::string_view name) const {
  auto it = counters_.find(name);
  return it == counters_.end() ? 0.0 : it->second;
}

}  // namespace meshsim
