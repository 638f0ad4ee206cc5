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

#include "meshsim/mesh.h"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "meshsim/cluster.h"
#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

std::string_view RequestClassName(RequestClass klass) {
  return klass == RequestClass::kData ? "Data" : "Action";
}

std::string_view EntrypointName(Entrypoint entrypoint) {
  switch (entrypoint) {
    case Entrypoint::kGateway: return "Gateway";
    case Entrypoint::kServiceEntry: return "ServiceEntry";
    case Entrypoint::kInternal: return "Internal";
    case Entrypoint::kNodePort: return "NodePort";
  }
  return "Unknown";
}

RequestClass ParseRequestClass(std::string_view s) {
  const std::string v = text::ToLower(text::Trim(s));
  if (v == "data") return RequestClass::kData;
  if (v == "action") return RequestClass::kAction;
  throw Error(ErrorCode::kParseError, fmt::format("unknown request class '{}'", s));
}

Entrypoint ParseEntrypoint(std::string_view s) {
  const std::string v = text::ToLower(text::Trim(s));
  if (v == "gateway") return Entrypoint::kGateway;
  if (v == "serviceentry" || v == "service-entry") return Entrypoint::kServiceEntry;
  if (v == "internal") return Entrypoint::kInternal;
  if (v == "nodeport") return Entrypoint::kNodePort;
  throw Error(ErrorCode::kParseError, fmt::format("unknown entrypoint '{}'", s));
}

Admission Admit(const Request& request) {
  switch (request.entrypoint) {
    case Entrypoint::kGateway:
    case Entrypoint::kInternal:
      return {};
    case Entrypoint::kServiceEntry:
      if (request.klass == RequestClass::kAction) {
        return {false, std::string(kActionViaServiceEntry)};
      }
      return {};
    case Entrypoint::kNodePort:
      return {false, std::string(kNodePortBanned)};
  }
  return {false, "UnknownEntrypoint"};
}

bool CompiledHeaderMatch::Matches(
    const std::map<std::string, std::string>& headers) const {
  auto it = headers.find(header);
  if (it == headers.end()) return false;
  switch (mode) {
    case MatchMode::kExact: return it->second == pattern;
    case MatchMode::kPrefix: return text::StartsWith(it->second, pattern);
    case MatchMode::kRegex: return std::regex_match(it->second, regex);
  }
  return false;
}

bool CompiledRoute::Matches(const Request& request) const {
  if (clauses.empty()) return true;
  return std::any_of(clauses.begin(), clauses.end(), [&](const auto& clause) {
    return std::all_of(clause.begin(), clause.end(),
                       [&](const auto& m) { return m.Matches(request.headers); });
  });
}

namespace {

void ReduceWeights(CompiledRoute& route) {
  int g = 0;
  for (const auto& d : route.destinations) g = std::gcd(g, d.weight);
  if (g == 0) {
    // Every weight was zero: fall back to plain round robin.
    for (auto& d : route.destinations) d.weight = 1;
    g = 1;
  }
  route.weight_total = 0;
  for (auto& d : route.destinations) {
    d.weight /= g;
    route.weight_total += d.weight;
  }
}

}  // namespace

RoutingTable RoutingTable::Build(const ManifestSet& set) {
  RoutingTable table;
  for (const auto& vs : set.virtual_services) {
    std::vector<CompiledRoute> routes;
    for (const auto& http : vs.http) {
      CompiledRoute route;
      for (const auto& clause : http.match) {
        std::vector<CompiledHeaderMatch> compiled;
        for (const auto& h : clause.headers) {
          CompiledHeaderMatch m;
          m.header = h.header;
          m.mode = h.mode;
          m.pattern = h.pattern;
          if (h.mode == MatchMode::kRegex) {
            try {
              m.regex = std::regex(h.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
              throw Error(ErrorCode::kValidationFailed,
                          fmt::format("virtual service '{}': bad regex '{}': {}",
                                      vs.name, h.pattern, e.what()));
            }
          }
          compiled.push_back(std::move(m));
        }
        route.clauses.push_back(std::move(compiled));
      }
      const bool any_weight =
          std::any_of(http.route.begin(), http.route.end(),
                      [](const auto& d) { return d.weight.has_value(); });
      for (const auto& dest : http.route) {
        CompiledDestination d;
        d.host = dest.host;
        d.subset = dest.subset;
        d.retry = dest.retry;
        if (!dest.subset.empty()) {
          const DestinationRuleSpec* dr = set.FindDestinationRule(dest.host);
          const SubsetSpec* subset = dr ? dr->FindSubset(dest.subset) : nullptr;
          d.version = subset ? subset->version() : dest.subset;
        }
        d.weight = any_weight ? dest.weight.value_or(0) : 1;
        route.destinations.push_back(std::move(d));
      }
      if (route.destinations.empty()) continue;
      ReduceWeights(route);
      routes.push_back(std::move(route));
    }
    for (const auto& host : vs.hosts) {
      auto& list = table.routes_[host];
      list.insert(list.end(), routes.begin(), routes.end());
    }
  }
  auto add_default = [&](const std::string& host) {
    if (table.routes_.contains(host)) return;
    CompiledRoute route;
    CompiledDestination d;
    d.host = host;
    route.destinations.push_back(std::move(d));
    ReduceWeights(route);
    table.routes_[host].push_back(std::move(route));
  };
  for (const auto& svc : set.services) add_default(svc.name);
  for (const auto& dep : set.deployments) {
    add_default(dep.name);
    auto app = dep.pod_template.labels.find("app");
    if (app != dep.pod_template.labels.end()) add_default(app->second);
  }
  for (const auto& se : set.service_entries) {
    table.external_[se.external_host.empty() ? se.name : se.external_host] = se.name;
    table.external_[se.name] = se.name;
  }
  return table;
}

const std::vector<CompiledRoute>* RoutingTable::Routes(std::string_view host) const {
  auto it = routes_.find(host);
  return it == routes_.end() ? nullptr : &it->second;
}

bool RoutingTable::IsExternal(std::string_view host) const {
  return external_.find(host) != external_.end();
}

std::vector<std::string> RoutingTable::Hosts() const {
  std::vector<std::string> hosts;
  for (const auto& [host, _] : routes_) hosts.push_back(host);
  return hosts;
}

ClusterPodSource::ClusterPodSource(const Cluster& cluster,
                                   std::vector<ServiceSpec> services)
    : cluster_(cluster), services_(std::move(services)) {}

std::vector<std::string> ClusterPodSource::Deployments(std::string_view host,
                                                       std::string_view version) const {
  std::vector<std::string> out;
  for (const auto& name : cluster_.DeploymentNames()) {
    const DeploymentState& state = cluster_.deployment(name);
    if (!ServesHost(state.spec, host, services_)) continue;
    if (!version.empty() && state.spec.pod_template.version() != version) continue;
    out.push_back(name);
  }
  return out;
}

std::vector<PodRef> ClusterPodSource::RunningPods(std::string_view host,
                                                  std::string_view version) const {
  std::vector<PodRef> out;
  const std::vector<std::string> deployments = Deployments(host, {});
  for (const auto& pod : cluster_.pods()) {
    if (pod.phase != PodPhase::kRunning) continue;
    if (!version.empty() && pod.version != version) continue;
    if (std::find(deployments.begin(), deployments.end(), pod.deployment) ==
        deployments.end()) {
      continue;
    }
    out.push_back({pod.id, pod.deployment});
  }
  return out;
}

void StaticPodSource::Add(std::string host, std::string version, PodRef pod) {
  entries_.push_back({std::move(host), std::move(version), std::move(pod)});
}

std::vector<std::string> StaticPodSource::Deployments(std::string_view host,
                                                      std::string_view version) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.host != host || (!version.empty() && e.version != version)) continue;
    if (std::find(out.begin(), out.end(), e.pod.deployment) == out.end()) {
      out.push_back(e.pod.deployment);
    }
  }
  return out;
}

std::vector<PodRef> StaticPodSource::RunningPods(std::string_view host,
                                                 std::string_view version) const {
  std::vector<PodRef> out;
  for (const auto& e : entries_) {
    if (e.host == host && (version.empty() || e.version == version)) {
      out.push_back(e.pod);
    }
  }
  return out;
}

Router::Router(const RoutingTable& table) : table_(table) {}

Selection Router::SelectDestination(const Request& request) {
  const std::vector<CompiledRoute>* routes = table_.Routes(request.target_host);
  if (routes == nullptr || routes->empty()) {
    throw Error(ErrorCode::kNotFound,
                fmt::format("no route for host '{}'", request.target_host));
  }
  Selection sel;
  std::size_t index = routes->size();
  for (std::size_t i = 0; i < routes->size(); ++i) {
    if ((*routes)[i].Matches(request)) {
      index = i;
      break;
    }
  }
  if (index == routes->size()) {
    throw Error(ErrorCode::kNotFound,
                fmt::format("no route of host '{}' matches", request.target_host));
  }
  const CompiledRoute& route = (*routes)[index];
  sel.route = &route;
  sel.route_index = index;
  sel.matched = !route.clauses.empty();

  auto& state = current_[request.target_host];
  if (state.size() != routes->size()) {
    state.assign(routes->size(), {});
    for (std::size_t i = 0; i < routes->size(); ++i) {
      state[i].assign((*routes)[i].destinations.size(), 0);
    }
  }
  std::vector<int>& current = state[index];
  std::size_t best = 0;
  for (std::size_t i = 0; i < route.destinations.size(); ++i) {
    current[i] += route.destinations[i].weight;
    if (current[i] > current[best]) best = i;
  }
  current[best] -= route.weight_total;
  sel.destination = &route.destinations[best];
  return sel;
}

Selection Router::Select(const Request& request, const PodSource& pods) {
  Selection sel = SelectDestination(request);
  const CompiledDestination& dest = *sel.destination;
  std::vector<PodRef> running = pods.RunningPods(dest.host, dest.version);
  if (!running.empty()) {
    std::uint64_t& counter = round_robin_[dest.host + "/" + dest.version];
    sel.pod = running[counter % running.size()];
    ++counter;
  }
  return sel;
}

std::string_view OutcomeStatusName(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kSuccess: return "Success";
    case OutcomeStatus::kTimedOut: return "TimedOut";
    case OutcomeStatus::kRejected: return "Rejected";
    case OutcomeStatus::kUnavailable: return "Unavailable";
  }
  return "Unknown";
}

Tick ServiceTimeProfile::Lookup(const PodRef& pod) const {
  if (auto it = pods_.find(pod.id); it != pods_.end()) return it->second;
  if (auto it = deployments_.find(pod.deployment); it != deployments_.end()) {
    return it->second;
  }
  return default_;
}

Mesh::Mesh(Engine& engine, const RoutingTable& table, const PodSource& pods,
           ServiceTimeProfile profile, MeshOptions options)
    : engine_(engine),
      router_(table),
      pods_(pods),
      profile_(std::move(profile)),
      options_(options) {}

void Mesh::Submit(Request request, Callback done) {
  if (request.id == 0) request.id = next_id_;
  next_id_ = std::max(next_id_, request.id + 1);
  request.issued_at = engine_.now();
  auto flight = std::make_shared<Flight>();
  flight->outcome.id = request.id;
  flight->outcome.host = request.target_host;
  flight->retry = options_.default_retry;
  flight->request = std::move(request);
  flight->done = std::move(done);
  ++in_flight_;

  const Admission admission = Admit(flight->request);
  if (!admission.admitted) {
    Finish(flight, OutcomeStatus::kRejected, admission.reason);
    return;
  }
  if (router_.table().IsExternal(flight->request.target_host)) {
    engine_.ScheduleAfter(options_.external_latency, EventKind::kTryComplete,
                          [this, flight] {
                            flight->outcome.attempts = 1;
                            flight->outcome.path.push_back(flight->request.target_host);
                            Finish(flight, OutcomeStatus::kSuccess);
                          });
    return;
  }
  if (router_.table().Routes(flight->request.target_host) == nullptr) {
    Finish(flight, OutcomeStatus::kRejected, "UnknownHost");
    return;
  }
  if (flight->request.entrypoint == Entrypoint::kGateway) {
    engine_.ScheduleAfter(options_.gateway_hop, EventKind::kRequestArrival,
                          [this, flight] { Try(flight); });
  } else {
    Try(flight);
  }
}

void Mesh::Try(std::shared_ptr<Flight> flight) {
  Selection sel;
  try {
    sel = router_.Select(flight->request, pods_);
  } catch (const Error& e) {
    Finish(flight, OutcomeStatus::kRejected, std::string(ErrorCodeName(e.code())));
    return;
  }
  if (!flight->retry_fixed) {
    flight->retry = sel.destination->retry.value_or(options_.default_retry);
    flight->retry_fixed = true;
  }
  ++flight->outcome.attempts;
  const bool last = flight->outcome.attempts >= flight->retry.attempts;

  if (!sel.pod) {
    const std::vector<std::string> deployments =
        pods_.Deployments(sel.destination->host, sel.destination->version);
    if (!deployments.empty()) ++window_load_[deployments.front()];
    if (last) {
      Finish(flight, OutcomeStatus::kUnavailable, "NoLivePod");
    } else {
      engine_.ScheduleAfter(0, EventKind::kTryComplete, [this, flight] { Try(flight); });
    }
    return;
  }
  ++window_load_[sel.pod->deployment];
  flight->outcome.path.push_back(sel.pod->id);
  const Tick service = profile_.Lookup(*sel.pod);
  const Tick timeout = flight->retry.per_try_timeout;
  if (service <= timeout) {
    engine_.ScheduleAfter(service, EventKind::kTryComplete,
                          [this, flight] { Finish(flight, OutcomeStatus::kSuccess); });
  } else if (last) {
    engine_.ScheduleAfter(timeout, EventKind::kTryComplete,
                          [this, flight] { Finish(flight, OutcomeStatus::kTimedOut); });
  } else {
    engine_.ScheduleAfter(timeout, EventKind::kTryComplete,
                          [this, flight] { Try(flight); });
  }
}

void Mesh::Finish(std::shared_ptr<Flight> flight, OutcomeStatus status,
                  std::string reason) {
  flight->outcome.status = status;
  flight->outcome.reason = std::move(reason);
  flight->outcome.finished_at = engine_.now();
  flight->outcome.latency = engine_.now() - flight->request.issued_at;
  --in_flight_;
  engine_.Count(fmt::format("requests.{}", OutcomeStatusName(status)));
  outcomes_.push_back(flight->outcome);
  if (flight->done) flight->done(outcomes_.back());
}

std::int64_t Mesh::TakeWindowLoad(std::string_view deployment) {
  auto it = window_load_.find(deployment);
  if (it == window_load_.end()) return 0;
  const std::int64_t load = it->second;
  it->second = 0;
  return load;
}

std::vector<Request> ParseRequestsCsv(std::string_view csv) {
  std::vector<Request> out;
  std::uint64_t id = 1;
  const std::vector<std::string> lines = text::SplitLines(csv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = text::Trim(lines[n]);
    if (line.empty()) continue;
    std::vector<std::string> f = text::Split(line, ',');
    if (n == 0 && text::Trim(f[0]) == "tick") continue;
    if (f.size() < 4 || f.size() > 5) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: expected tick,host,klass,entrypoint,header_cookie",
                              n + 1));
    }
    Request r;
    r.id = id++;
    r.issued_at = text::ParseInt(text::Trim(f[0]), "tick");
    r.target_host = std::string(text::Trim(f[1]));
    r.klass = ParseRequestClass(f[2]);
    r.entrypoint = ParseEntrypoint(f[3]);
    if (f.size() == 5 && !text::Trim(f[4]).empty()) {
      r.headers["cookie"] = std::string(text::Trim(f[4]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string RenderOutcomesCsv(const std::vector<RequestOutcome>& outcomes) {
  std::string out = "id,status,attempts,latency,path\n";
  for (const auto& o : outcomes) {
    out += fmt::format("{},{},{},{},{}\n", o.id, OutcomeStatusName(o.status),
                       o.attempts, o.latency, text::Join(o.path, ";"));
  }
  return out;
}

}  // namespace meshsim
