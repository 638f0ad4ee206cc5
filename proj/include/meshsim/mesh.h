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

#ifndef MESHSIM_MESH_H
#define MESHSIM_MESH_H

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/engine.h"
#include "meshsim/manifest.h"

namespace meshsim {

class Cluster;

enum class RequestClass { kData, kAction };
enum class Entrypoint { kGateway, kServiceEntry, kInternal, kNodePort };

std::string_view RequestClassName(RequestClass klass);
std::string_view EntrypointName(Entrypoint entrypoint);
RequestClass ParseRequestClass(std::string_view s);
Entrypoint ParseEntrypoint(std::string_view s);

struct Request {
  std::uint64_t id = 0;
  std::map<std::string, std::string> headers;
  std::string target_host;
  RequestClass klass = RequestClass::kData;
  Entrypoint entrypoint = Entrypoint::kInternal;
  Tick issued_at = 0;
};

struct Admission {
  bool admitted = true;
  std::string reason;  // empty when admitted

  bool operator==(const Admission&) const = default;
};

// Gateway and Internal admit everything. ServiceEntry admits Data only.
// NodePort ingress is never admitted.
Admission Admit(const Request& request);

inline constexpr std::string_view kActionViaServiceEntry = "ActionViaServiceEntry";
inline constexpr std::string_view kNodePortBanned = "NodePortBanned";

struct CompiledHeaderMatch {
  std::string header;
  MatchMode mode = MatchMode::kRegex;
  std::string pattern;
  std::regex regex;

  bool Matches(const std::map<std::string, std::string>& headers) const;
};

struct CompiledDestination {
  std::string host;
  std::string subset;
  std::string version;  // empty: every pod of the host
  int weight = 1;       // gcd-reduced
  std::optional<RetryPolicy> retry;
};

struct CompiledRoute {
  // Any clause may match; within a clause every header must match. Empty
  // means the route matches everything.
  std::vector<std::vector<CompiledHeaderMatch>> clauses;
  std::vector<CompiledDestination> destinations;
  int weight_total = 0;

  bool Matches(const Request& request) const;
};

// Immutable after Build. Hosts without a VirtualService get a single
// unweighted route to every pod serving them.
class RoutingTable {
 public:
  static RoutingTable Build(const ManifestSet& set);

  const std::vector<CompiledRoute>* Routes(std::string_view host) const;
  bool IsExternal(std::string_view host) const;
  std::vector<std::string> Hosts() const;

 private:
  std::map<std::string, std::vector<CompiledRoute>, std::less<>> routes_;
  std::map<std::string, std::string, std::less<>> external_;
};

struct PodRef {
  std::string id;
  std::string deployment;

  bool operator==(const PodRef&) const = default;
};

// Where the router looks up pods. `version` empty means any version.
class PodSource {
 public:
  virtual ~PodSource() = default;
  virtual std::vector<std::string> Deployments(std::string_view host,
                                               std::string_view version) const = 0;
  virtual std::vector<PodRef> RunningPods(std::string_view host,
                                          std::string_view version) const = 0;
};

// Backed by a live cluster; Running pods of every deployment serving host.
class ClusterPodSource : public PodSource {
 public:
  ClusterPodSource(const Cluster& cluster, std::vector<ServiceSpec> services);

  std::vector<std::string> Deployments(std::string_view host,
                                       std::string_view version) const override;
  std::vector<PodRef> RunningPods(std::string_view host,
                                  std::string_view version) const override;

 private:
  const Cluster& cluster_;
  std::vector<ServiceSpec> services_;
};

// Fixed pod lists, for tests and benchmarks.
class StaticPodSource : public PodSource {
 public:
  void Add(std::string host, std::string version, PodRef pod);

  std::vector<std::string> Deployments(std::string_view host,
                                       std::string_view version) const override;
  std::vector<PodRef> RunningPods(std::string_view host,
                                  std::string_view version) const override;

 private:
  struct Entry {
    std::string host;
    std::string version;
    PodRef pod;
  };
  std::vector<Entry> entries_;
};

struct Selection {
  const CompiledRoute* route = nullptr;
  const CompiledDestination* destination = nullptr;
  std::size_t route_index = 0;
  bool matched = false;  // chosen by a match clause rather than the default
  std::optional<PodRef> pod;  // empty when the subset has no Running pod
};

// Selection state over an immutable table. Weighted routes use smooth
// weighted round robin; pods within a subset are picked round robin.
class Router {
 public:
  explicit Router(const RoutingTable& table);

  // Throws NotFound when the host has no routes.
  Selection Select(const Request& request, const PodSource& pods);
  // Subset choice only; no pod lookup and no pod round-robin advance.
  Selection SelectDestination(const Request& request);

  const RoutingTable& table() const { return table_; }

 private:
  const RoutingTable& table_;
  std::map<std::string, std::vector<std::vector<int>>, std::less<>> current_;
  std::map<std::string, std::uint64_t, std::less<>> round_robin_;
};

enum class OutcomeStatus { kSuccess, kTimedOut, kRejected, kUnavailable };
std::string_view OutcomeStatusName(OutcomeStatus status);

struct RequestOutcome {
  std::uint64_t id = 0;
  std::string host;
  OutcomeStatus status = OutcomeStatus::kSuccess;
  std::string reason;
  int attempts = 0;
  Tick latency = 0;
  Tick finished_at = 0;
  std::vector<std::string> path;

  bool operator==(const RequestOutcome&) const = default;
};

// Per-try service time: pod override, then deployment, then the default.
class ServiceTimeProfile {
 public:
  explicit ServiceTimeProfile(Tick default_time = 10) : default_(default_time) {}

  void SetForPod(std::string pod, Tick t) { pods_[std::move(pod)] = t; }
  void SetForDeployment(std::string deployment, Tick t) {
    deployments_[std::move(deployment)] = t;
  }
  Tick Lookup(const PodRef& pod) const;

 private:
  Tick default_;
  std::map<std::string, Tick, std::less<>> pods_;
  std::map<std::string, Tick, std::less<>> deployments_;
};

struct MeshOptions {
  Tick gateway_hop = 1;
  Tick external_latency = 1;
  RetryPolicy default_retry;
};

// Executes requests as engine events. Every try either completes within
// the per-try timeout or is abandoned at the timeout and retried on a
// freshly selected pod.
class Mesh {
 public:
  using Callback = std::function<void(const RequestOutcome&)>;

  Mesh(Engine& engine, const RoutingTable& table, const PodSource& pods,
       ServiceTimeProfile profile = ServiceTimeProfile(), MeshOptions options = {});

  Mesh(const Mesh&) = delete;
  Mesh& operator=(const Mesh&) = delete;

  // Starts the request at the current tick. Sets issued_at and assigns an
  // id when the request carries none.
  void Submit(Request request, Callback done = {});

  const std::vector<RequestOutcome>& outcomes() const { return outcomes_; }
  std::size_t in_flight() const { return in_flight_; }

  // Requests routed to `deployment` since the last call.
  std::int64_t TakeWindowLoad(std::string_view deployment);

  Router& router() { return router_; }
  ServiceTimeProfile& profile() { return profile_; }

 private:
  struct Flight {
    Request request;
    RetryPolicy retry;
    bool retry_fixed = false;
    RequestOutcome outcome;
    Callback done;
  };

  void Try(std::shared_ptr<Flight> flight);
  void Finish(std::shared_ptr<Flight> flight, OutcomeStatus status,
              std::string reason = {});

  Engine& engine_;
  Router router_;
  const PodSource& pods_;
  ServiceTimeProfile profile_;
  MeshOptions options_;
  std::uint64_t next_id_ = 1;
  std::size_t in_flight_ = 0;
  std::vector<RequestOutcome> outcomes_;
  std::map<std::string, std::int64_t, std::less<>> window_load_;
};

// `tick,host,klass,entrypoint,header_cookie`; a leading header row is
// skipped. Requests get ids 1..n in file order.
std::vector<Request> ParseRequestsCsv(std::string_view text);
// `id,status,attempts,latency,path` with `;` between pod ids.
std::string RenderOutcomesCsv(const std::vector<RequestOutcome>& outcomes);

}  // namespace meshsim

#endif  // MESHSIM_MESH_H
