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

#ifndef MESHSIM_MANIFEST_H
#define MESHSIM_MANIFEST_H

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/engine.h"

namespace meshsim {

using Labels = std::map<std::string, std::string>;

inline constexpr std::string_view kVersionLabel = "version";
inline constexpr std::string_view kDefaultVersion = "v1";

enum class Environment { kOnPremise, kCloud };
std::string_view EnvironmentName(Environment env);
Environment ParseEnvironment(std::string_view s);

enum class ServiceType { kClusterIP, kNodePort, kLoadBalancer, kVirtualServiceManaged };
std::string_view ServiceTypeName(ServiceType type);

// A container environment variable. Either a literal (possibly holding
// `${...}` placeholders) or a reference into a config map.
struct EnvVar {
  std::string name;
  std::string value;
  std::string config_map;  // set for valueFrom.configMapKeyRef
  std::string config_key;  // empty means "the whole map"

  bool operator==(const EnvVar&) const = default;
};

struct PodTemplate {
  Labels labels;
  Labels annotations;
  std::string container_name;
  std::string image;
  int container_port = 0;
  std::vector<EnvVar> env;
  std::vector<std::string> env_from;       // whole config maps
  std::vector<std::string> volume_claims;  // persistentVolumeClaim names
  std::string restart_policy;

  std::string version() const;
  // Every config map this template names, including `${map.key}` forms.
  std::vector<std::string> ConfigMapRefs() const;

  bool operator==(const PodTemplate&) const = default;
};

struct DeploymentSpec {
  std::string api_version;
  std::string name;
  Labels labels;
  int replicas = 1;
  Labels selector;
  PodTemplate pod_template;

  bool operator==(const DeploymentSpec&) const = default;
};

struct ServicePort {
  int port = 80;
  int target_port = 80;
  std::string protocol = "TCP";
  std::string name;

  bool operator==(const ServicePort&) const = default;
};

struct ServiceSpec {
  std::string api_version;
  std::string name;
  Labels labels;
  Labels selector;
  ServiceType type = ServiceType::kClusterIP;
  std::vector<ServicePort> ports;

  bool operator==(const ServiceSpec&) const = default;
};

struct RetryPolicy {
  int attempts = 3;
  Tick per_try_timeout = 667;

  bool operator==(const RetryPolicy&) const = default;
};

enum class MatchMode { kExact, kPrefix, kRegex };

struct HeaderMatch {
  std::string header;
  MatchMode mode = MatchMode::kRegex;
  std::string pattern;

  bool operator==(const HeaderMatch&) const = default;
};

// One entry of a `match:` list; all headers must match.
struct MatchClause {
  std::vector<HeaderMatch> headers;

  bool operator==(const MatchClause&) const = default;
};

struct RouteDestination {
  std::string host;
  std::string subset;
  std::optional<int> weight;
  std::optional<RetryPolicy> retry;

  bool operator==(const RouteDestination&) const = default;
};

// One `http:` entry. An empty `match` list makes this a default route.
struct HttpRoute {
  std::vector<MatchClause> match;
  std::vector<RouteDestination> route;

  bool operator==(const HttpRoute&) const = default;
};

struct VirtualServiceSpec {
  std::string api_version;
  std::string name;
  std::vector<std::string> hosts;
  std::vector<HttpRoute> http;

  bool operator==(const VirtualServiceSpec&) const = default;
};

struct SubsetSpec {
  std::string name;
  Labels labels;

  std::string version() const;
  bool operator==(const SubsetSpec&) const = default;
};

struct DestinationRuleSpec {
  std::string api_version;
  std::string name;
  std::string host;
  std::vector<SubsetSpec> subsets;

  const SubsetSpec* FindSubset(std::string_view subset) const;
  bool operator==(const DestinationRuleSpec&) const = default;
};

struct ConfigMapSpec {
  std::string api_version;
  std::string name;
  std::map<std::string, std::string> entries;

  bool operator==(const ConfigMapSpec&) const = default;
};

// External systems reachable through a service entry accept data traffic
// only; there is deliberately no field to widen that.
struct ServiceEntrySpec {
  std::string api_version;
  std::string name;
  std::string external_host;

  bool operator==(const ServiceEntrySpec&) const = default;
};

inline constexpr int kDefaultAutoscaleThreshold = 100;

struct AutoscalerSpec {
  std::string api_version;
  std::string name;
  std::string deployment;
  int min = 1;
  int max = 1;
  // Requests per pod per 1000-tick window.
  int threshold = kDefaultAutoscaleThreshold;

  bool operator==(const AutoscalerSpec&) const = default;
};

struct VolumeSpec {
  std::string api_version;
  std::string kind;  // PersistentVolume or PersistentVolumeClaim
  std::string name;

  bool operator==(const VolumeSpec&) const = default;
};

struct ManifestSet {
  std::vector<DeploymentSpec> deployments;
  std::vector<ServiceSpec> services;
  std::vector<VirtualServiceSpec> virtual_services;
  std::vector<DestinationRuleSpec> destination_rules;
  std::vector<ConfigMapSpec> config_maps;
  std::vector<ServiceEntrySpec> service_entries;
  std::vector<AutoscalerSpec> autoscalers;
  std::vector<VolumeSpec> volumes;

  const DeploymentSpec* FindDeployment(std::string_view name) const;
  const ServiceSpec* FindService(std::string_view name) const;
  const ConfigMapSpec* FindConfigMap(std::string_view name) const;
  const DestinationRuleSpec* FindDestinationRule(std::string_view host) const;

  // Appends `other`; throws DuplicateName when a kind repeats a name.
  void Merge(const ManifestSet& other);

  bool operator==(const ManifestSet&) const = default;
};

// True when `deployment` backs mesh host `host`: same name, an `app` label
// equal to the host, or a Service named `host` whose selector matches.
bool ServesHost(const DeploymentSpec& deployment, std::string_view host,
                const std::vector<ServiceSpec>& services);

// Parses one or more `---` separated documents. Throws ParseError (with a
// line number), UnknownKind or DuplicateName.
ManifestSet ParseManifest(std::string_view text);
ManifestSet LoadManifestFile(const std::string& path);

std::string SerializeManifest(const ManifestSet& set);
// Deterministic rendering of a pod template, used for replica-set hashing.
std::string CanonicalTemplate(const PodTemplate& pod_template);

// Accepts `<n>ms` and `<n>s`.
Tick ParseDuration(std::string_view s);

enum class Severity { kError, kWarn };

struct Finding {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  std::string kind;
  std::string name;

  // `ERROR|WARN <code>: <message> (<kind>/<name>)`
  std::string Render() const;
  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return error_count() == 0; }
  std::size_t error_count() const;
  bool Has(std::string_view code) const;
  std::string Render() const;

  bool operator==(const ValidationReport&) const = default;
};

ValidationReport Validate(const ManifestSet& set, Environment environment);

}  // namespace meshsim

#endif  // MESHSIM_MANIFEST_H
