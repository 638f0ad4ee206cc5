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

#include "meshsim/manifest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "meshsim/error.h"
#include "meshsim/yaml.h"
#include "text.h"

namespace meshsim {

using yaml::Node;

std::string_view EnvironmentName(Environment env) {
  return env == Environment::kCloud ? "Cloud" : "OnPremise";
}

Environment ParseEnvironment(std::string_view s) {
  const std::string lower = text::ToLower(s);
  if (lower == "onpremise" || lower == "on-premise") return Environment::kOnPremise;
  if (lower == "cloud") return Environment::kCloud;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown environment '{}'", s));
}

std::string_view ServiceTypeName(ServiceType type) {
  switch (type) {
    case ServiceType::kClusterIP: return "ClusterIP";
    case ServiceType::kNodePort: return "NodePort";
    case ServiceType::kLoadBalancer: return "LoadBalancer";
    case ServiceType::kVirtualServiceManaged: return "VirtualService";
  }
  return "ClusterIP";
}

std::string PodTemplate::version() const {
  auto it = labels.find(std::string(kVersionLabel));
  return it == labels.end() ? std::string(kDefaultVersion) : it->second;
}

namespace {

// Collects `map` out of every `${map.key}` placeholder in `value`.
void CollectQualifiedRefs(std::string_view value, std::vector<std::string>& out) {
  std::size_t pos = 0;
  while ((pos = value.find("${", pos)) != std::string_view::npos) {
    const auto end = value.find('}', pos);
    if (end == std::string_view::npos) return;
    const auto inner = value.substr(pos + 2, end - pos - 2);
    const auto dot = inner.find('.');
    if (dot != std::string_view::npos) out.emplace_back(inner.substr(0, dot));
    pos = end + 1;
  }
}

}  // namespace

std::vector<std::string> PodTemplate::ConfigMapRefs() const {
  std::vector<std::string> refs = env_from;
  for (const auto& var : env) {
    if (!var.config_map.empty()) refs.push_back(var.config_map);
    CollectQualifiedRefs(var.value, refs);
  }
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  return refs;
}

std::string SubsetSpec::version() const {
  auto it = labels.find(std::string(kVersionLabel));
  return it == labels.end() ? std::string() : it->second;
}

const SubsetSpec* DestinationRuleSpec::FindSubset(std::string_view subset) const {
  for (const auto& s : subsets) {
    if (s.name == subset) return &s;
  }
  return nullptr;
}

namespace {

template <typename T>
const T* FindByName(const std::vector<T>& items, std::string_view name) {
  for (const auto& item : items) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

template <typename T>
void AppendUnique(std::vector<T>& into, const std::vector<T>& from,
                  std::string_view kind) {
  for (const auto& item : from) {
    if (FindByName(into, item.name) != nullptr) {
      throw Error(ErrorCode::kDuplicateName,
                  fmt::format("{} '{}' is defined more than once", kind, item.name));
    }
    into.push_back(item);
  }
}

}  // namespace

const DeploymentSpec* ManifestSet::FindDeployment(std::string_view name) const {
  return FindByName(deployments, name);
}
const ServiceSpec* ManifestSet::FindService(std::string_view name) const {
  return FindByName(services, name);
}
const ConfigMapSpec* ManifestSet::FindConfigMap(std::string_view name) const {
  return FindByName(config_maps, name);
}
const DestinationRuleSpec* ManifestSet::FindDestinationRule(
    std::string_view host) const {
  for (const auto& dr : destination_rules) {
    if (dr.host == host) return &dr;
  }
  return nullptr;
}

void ManifestSet::Merge(const ManifestSet& other) {
  AppendUnique(deployments, other.deployments, "Deployment");
  AppendUnique(services, other.services, "Service");
  AppendUnique(virtual_services, other.virtual_services, "VirtualService");
  AppendUnique(destination_rules, other.destination_rules, "DestinationRule");
  AppendUnique(config_maps, other.config_maps, "ConfigMap");
  AppendUnique(service_entries, other.service_entries, "ServiceEntry");
  AppendUnique(autoscalers, other.autoscalers, "HorizontalPodAutoscaler");
  AppendUnique(volumes, other.volumes, "PersistentVolume");
}

bool ServesHost(const DeploymentSpec& deployment, std::string_view host,
                const std::vector<ServiceSpec>& services) {
  if (deployment.name == host) return true;
  auto app = deployment.pod_template.labels.find("app");
  if (app != deployment.pod_template.labels.end() && app->second == host) {
    return true;
  }
  for (const auto& svc : services) {
    if (svc.name != host || svc.selector.empty()) continue;
    const bool matches = std::all_of(
        svc.selector.begin(), svc.selector.end(), [&](const auto& kv) {
          auto it = deployment.pod_template.labels.find(kv.first);
          return it != deployment.pod_template.labels.end() &&
                 it->second == kv.second;
        });
    if (matches) return true;
  }
  return false;
}

Tick ParseDuration(std::string_view s) {
  s = text::Trim(s);
  double scale = 1;
  if (text::EndsWith(s, "ms")) {
    s.remove_suffix(2);
  } else if (text::EndsWith(s, "s")) {
    s.remove_suffix(1);
    scale = 1000;
  }
  const double value = text::ParseDouble(s, "duration") * scale;
  return static_cast<Tick>(std::llround(value));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void Fail(const Node& at, std::string_view what) {
  throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", at.line, what));
}

std::string Scalar(const Node& n, std::string_view what) {
  if (n.IsNull()) return {};
  if (!n.IsScalar()) Fail(n, fmt::format("{} must be a scalar", what));
  return n.scalar;
}

std::string ScalarAt(const Node& map, std::string_view key) {
  const Node* n = map.Find(key);
  return n == nullptr ? std::string() : Scalar(*n, key);
}

int IntAt(const Node& map, std::string_view key, int fallback) {
  const Node* n = map.Find(key);
  if (n == nullptr || n->IsNull()) return fallback;
  try {
    return static_cast<int>(text::ParseInt(Scalar(*n, key), key));
  } catch (const Error&) {
    Fail(*n, fmt::format("{} must be an integer", key));
  }
}

const Node& MapAt(const Node& map, std::string_view key) {
  static const Node kEmpty = Node::Map();
  const Node* n = map.Find(key);
  if (n == nullptr || n->IsNull()) return kEmpty;
  if (!n->IsMap()) Fail(*n, fmt::format("{} must be a map", key));
  return *n;
}

const std::vector<Node>& ListAt(const Node& map, std::string_view key) {
  static const std::vector<Node> kEmpty;
  const Node* n = map.Find(key);
  if (n == nullptr || n->IsNull()) return kEmpty;
  if (!n->IsList()) Fail(*n, fmt::format("{} must be a list", key));
  return n->items;
}

std::map<std::string, std::string> StringMap(const Node& n, std::string_view what) {
  std::map<std::string, std::string> out;
  if (n.IsNull()) return out;
  if (!n.IsMap()) Fail(n, fmt::format("{} must be a map", what));
  for (const auto& e : n.entries) {
    if (!out.emplace(e.key, Scalar(e.value, e.key)).second) {
      Fail(e.value, fmt::format("duplicate key '{}' in {}", e.key, what));
    }
  }
  return out;
}

Labels LabelsAt(const Node& map, std::string_view key) {
  const Node* n = map.Find(key);
  return n == nullptr ? Labels() : StringMap(*n, key);
}

std::string RequireName(const Node& doc) {
  std::string name = ScalarAt(MapAt(doc, "metadata"), "name");
  if (name.empty()) name = ScalarAt(doc, "name");
  if (name.empty()) Fail(doc, "missing metadata.name");
  return name;
}

RetryPolicy ParseRetry(const Node& n) {
  if (!n.IsMap()) Fail(n, "retries must be a map");
  RetryPolicy retry;
  retry.attempts = IntAt(n, "attempts", retry.attempts);
  if (retry.attempts < 1) Fail(n, "retries.attempts must be >= 1");
  if (const Node* t = n.Find("perTryTimeout"); t != nullptr) {
    try {
      retry.per_try_timeout = ParseDuration(Scalar(*t, "perTryTimeout"));
    } catch (const Error&) {
      Fail(*t, "perTryTimeout must look like 667ms or 2s");
    }
  }
  if (retry.per_try_timeout <= 0) Fail(n, "retries.perTryTimeout must be > 0");
  return retry;
}

EnvVar ParseEnvVar(const Node& item) {
  if (!item.IsMap()) Fail(item, "env entries must be maps");
  EnvVar var;
  var.name = ScalarAt(item, "name");
  var.value = ScalarAt(item, "value");
  if (const Node* from = item.Find("valueFrom"); from != nullptr && from->IsMap()) {
    if (const Node* ref = from->Find("configMapKeyRef"); ref != nullptr) {
      if (ref->IsScalar()) {
        var.config_map = ref->scalar;
      } else if (ref->IsMap()) {
        var.config_map = ScalarAt(*ref, "name");
        var.config_key = ScalarAt(*ref, "key");
      } else {
        Fail(*ref, "configMapKeyRef must be a name or a map");
      }
      if (var.config_map.empty()) Fail(*ref, "configMapKeyRef needs a name");
    }
  }
  return var;
}

void ParsePodSpec(const Node& pod_spec, PodTemplate& t) {
  const auto& containers = ListAt(pod_spec, "containers");
  if (!containers.empty()) {
    const Node& c = containers.front();
    if (!c.IsMap()) Fail(c, "containers entries must be maps");
    t.container_name = ScalarAt(c, "name");
    t.image = ScalarAt(c, "image");
    for (const auto& port : ListAt(c, "ports")) {
      if (!port.IsMap()) Fail(port, "ports entries must be maps");
      t.container_port = IntAt(port, "containerPort", 0);
      break;
    }
    for (const auto& item : ListAt(c, "env")) t.env.push_back(ParseEnvVar(item));
    for (const auto& item : ListAt(c, "envFrom")) {
      if (!item.IsMap()) Fail(item, "envFrom entries must be maps");
      const std::string name = ScalarAt(MapAt(item, "configMapRef"), "name");
      if (name.empty()) Fail(item, "envFrom needs configMapRef.name");
      t.env_from.push_back(name);
    }
  }
  for (const auto& vol : ListAt(pod_spec, "volumes")) {
    if (!vol.IsMap()) Fail(vol, "volumes entries must be maps");
    const std::string claim = ScalarAt(MapAt(vol, "persistentVolumeClaim"), "claimName");
    if (!claim.empty()) t.volume_claims.push_back(claim);
  }
  t.restart_policy = ScalarAt(pod_spec, "restartPolicy");
}

DeploymentSpec ParseDeployment(const Node& doc) {
  DeploymentSpec d;
  d.api_version = ScalarAt(doc, "apiVersion");
  d.name = RequireName(doc);
  d.labels = LabelsAt(MapAt(doc, "metadata"), "labels");
  const Node& spec = MapAt(doc, "spec");
  d.replicas = IntAt(spec, "replicas", 1);
  if (d.replicas < 1) {
    Fail(spec.Find("replicas") ? *spec.Find("replicas") : spec, "replicas must be >= 1");
  }
  d.selector = LabelsAt(MapAt(spec, "selector"), "matchLabels");
  if (spec.Find("template") != nullptr) {
    const Node& tmpl = MapAt(spec, "template");
    const Node& meta = MapAt(tmpl, "metadata");
    d.pod_template.labels = LabelsAt(meta, "labels");
    d.pod_template.annotations = LabelsAt(meta, "annotations");
    ParsePodSpec(MapAt(tmpl, "spec"), d.pod_template);
  } else {
    // Containers directly under spec: treated as an inline pod template.
    ParsePodSpec(spec, d.pod_template);
  }
  d.pod_template.labels.emplace(std::string(kVersionLabel), std::string(kDefaultVersion));
  return d;
}

ServiceType ParseServiceType(const Node& spec) {
  const Node* n = spec.Find("type");
  if (n == nullptr || n->IsNull()) return ServiceType::kClusterIP;
  const std::string lower = text::ToLower(Scalar(*n, "type"));
  if (lower == "clusterip" || lower == "cluster-ip") return ServiceType::kClusterIP;
  if (lower == "nodeport") return ServiceType::kNodePort;
  if (lower == "loadbalancer") return ServiceType::kLoadBalancer;
  if (lower == "virtualservice") return ServiceType::kVirtualServiceManaged;
  Fail(*n, fmt::format("unknown service type '{}'", n->scalar));
}

ServiceSpec ParseService(const Node& doc) {
  ServiceSpec s;
  s.api_version = ScalarAt(doc, "apiVersion");
  s.name = RequireName(doc);
  s.labels = LabelsAt(MapAt(doc, "metadata"), "labels");
  const Node& spec = MapAt(doc, "spec");
  s.type = ParseServiceType(spec);
  s.selector = LabelsAt(spec, "selector");
  for (const auto& p : ListAt(spec, "ports")) {
    if (!p.IsMap()) Fail(p, "ports entries must be maps");
    ServicePort port;
    port.port = IntAt(p, "port", 80);
    port.target_port = IntAt(p, "targetPort", port.port);
    const std::string protocol = ScalarAt(p, "protocol");
    if (!protocol.empty()) port.protocol = protocol;
    port.name = ScalarAt(p, "name");
    s.ports.push_back(port);
  }
  return s;
}

MatchClause ParseMatchClause(const Node& item) {
  if (!item.IsMap()) Fail(item, "match entries must be maps");
  MatchClause clause;
  const Node& headers = MapAt(item, "headers");
  for (const auto& e : headers.entries) {
    if (!e.value.IsMap() || e.value.entries.size() != 1) {
      Fail(e.value, "header match needs exactly one of exact, prefix, regex");
    }
    const auto& [mode, pattern] = e.value.entries.front();
    HeaderMatch m;
    m.header = text::ToLower(e.key);
    m.pattern = Scalar(pattern, mode);
    if (mode == "exact") {
      m.mode = MatchMode::kExact;
    } else if (mode == "prefix") {
      m.mode = MatchMode::kPrefix;
    } else if (mode == "regex") {
      m.mode = MatchMode::kRegex;
    } else {
      Fail(e.value, fmt::format("unknown header match '{}'", mode));
    }
    clause.headers.push_back(std::move(m));
  }
  return clause;
}

RouteDestination ParseRouteItem(const Node& item) {
  if (!item.IsMap()) Fail(item, "route entries must be maps");
  RouteDestination dest;
  const Node& d = MapAt(item, "destination");
  dest.host = ScalarAt(d, "host");
  if (dest.host.empty()) Fail(item, "route destination needs a host");
  dest.subset = ScalarAt(d, "subset");
  if (const Node* w = item.Find("weight"); w != nullptr && !w->IsNull()) {
    const int weight = IntAt(item, "weight", 0);
    if (weight < 0 || weight > 100) Fail(*w, "weight must be within 0..100");
    dest.weight = weight;
  }
  if (const Node* r = item.Find("retries"); r != nullptr && !r->IsNull()) {
    dest.retry = ParseRetry(*r);
  }
  return dest;
}

HttpRoute ParseHttpRoute(const Node& item) {
  if (!item.IsMap()) Fail(item, "http entries must be maps");
  HttpRoute route;
  // `retries` may follow a run of route entries; it covers every entry
  // appended since the previous `retries` that has no policy of its own.
  std::size_t retry_from = 0;
  for (const auto& e : item.entries) {
    if (e.key == "match") {
      if (!e.value.IsList()) Fail(e.value, "match must be a list");
      for (const auto& m : e.value.items) route.match.push_back(ParseMatchClause(m));
    } else if (e.key == "route") {
      if (!e.value.IsList()) Fail(e.value, "route must be a list");
      for (const auto& r : e.value.items) route.route.push_back(ParseRouteItem(r));
    } else if (e.key == "retries") {
      const RetryPolicy retry = ParseRetry(e.value);
      for (std::size_t i = retry_from; i < route.route.size(); ++i) {
        if (!route.route[i].retry) route.route[i].retry = retry;
      }
      retry_from = route.route.size();
    }
  }
  if (route.route.empty()) Fail(item, "http entry has no route");
  return route;
}

VirtualServiceSpec ParseVirtualService(const Node& doc) {
  VirtualServiceSpec vs;
  vs.api_version = ScalarAt(doc, "apiVersion");
  vs.name = RequireName(doc);
  const Node& spec = MapAt(doc, "spec");
  for (const auto& h : ListAt(spec, "hosts")) vs.hosts.push_back(Scalar(h, "hosts"));
  if (vs.hosts.empty()) Fail(spec, "virtual service needs at least one host");
  for (const auto& item : ListAt(spec, "http")) vs.http.push_back(ParseHttpRoute(item));
  return vs;
}

DestinationRuleSpec ParseDestinationRule(const Node& doc) {
  DestinationRuleSpec dr;
  dr.api_version = ScalarAt(doc, "apiVersion");
  dr.name = RequireName(doc);
  const Node& spec = MapAt(doc, "spec");
  dr.host = ScalarAt(spec, "host");
  if (dr.host.empty()) Fail(spec, "destination rule needs a host");
  for (const auto& s : ListAt(spec, "subsets")) {
    if (!s.IsMap()) Fail(s, "subsets entries must be maps");
    SubsetSpec subset;
    subset.name = ScalarAt(s, "name");
    if (subset.name.empty()) Fail(s, "subset needs a name");
    subset.labels = LabelsAt(s, "labels");
    dr.subsets.push_back(std::move(subset));
  }
  return dr;
}

ConfigMapSpec ParseConfigMap(const Node& doc) {
  ConfigMapSpec cm;
  cm.api_version = ScalarAt(doc, "apiVersion");
  if (const Node* data = doc.Find("data"); data != nullptr) {
    cm.name = RequireName(doc);
    cm.entries = StringMap(*data, "data");
  } else if (!ScalarAt(doc, "name").empty()) {
    // Short form: top-level name with the entries held under metadata.
    cm.name = ScalarAt(doc, "name");
    cm.entries = StringMap(MapAt(doc, "metadata"), "metadata");
  } else {
    cm.name = RequireName(doc);
  }
  return cm;
}

ServiceEntrySpec ParseServiceEntry(const Node& doc) {
  ServiceEntrySpec se;
  se.api_version = ScalarAt(doc, "apiVersion");
  se.name = RequireName(doc);
  const Node& spec = MapAt(doc, "spec");
  const auto& hosts = ListAt(spec, "hosts");
  se.external_host = hosts.empty() ? ScalarAt(spec, "host") : Scalar(hosts.front(), "hosts");
  if (se.external_host.empty()) Fail(spec, "service entry needs a host");
  return se;
}

AutoscalerSpec ParseAutoscaler(const Node& doc) {
  AutoscalerSpec as;
  as.api_version = ScalarAt(doc, "apiVersion");
  as.name = RequireName(doc);
  const Node& spec = MapAt(doc, "spec");
  as.deployment = ScalarAt(MapAt(spec, "scaleTargetRef"), "name");
  if (as.deployment.empty()) as.deployment = ScalarAt(spec, "deployment");
  if (as.deployment.empty()) as.deployment = as.name;
  as.min = IntAt(spec, "minReplicas", IntAt(spec, "min", 1));
  as.max = IntAt(spec, "maxReplicas", IntAt(spec, "max", as.min));
  as.threshold = IntAt(spec, "threshold", kDefaultAutoscaleThreshold);
  if (as.min < 1) Fail(spec, "minReplicas must be >= 1");
  if (as.threshold < 1) Fail(spec, "threshold must be >= 1");
  return as;
}

VolumeSpec ParseVolume(const Node& doc, std::string kind) {
  VolumeSpec v;
  v.api_version = ScalarAt(doc, "apiVersion");
  v.kind = std::move(kind);
  v.name = RequireName(doc);
  return v;
}

template <typename T>
void AddUnique(std::vector<T>& into, T item, std::string_view kind, int line) {
  if (FindByName(into, item.name) != nullptr) {
    throw Error(ErrorCode::kDuplicateName,
                fmt::format("line {}: {} '{}' is defined more than once", line,
                            kind, item.name));
  }
  into.push_back(std::move(item));
}

}  // namespace

ManifestSet ParseManifest(std::string_view text) {
  ManifestSet set;
  for (const auto& doc : yaml::Parse(text)) {
    const Node& root = doc.root;
    if (!root.IsMap()) Fail(root, "a manifest document must be a map");
    const Node* kind_node = root.Find("kind");
    if (kind_node == nullptr) Fail(root, "missing kind");
    const std::string kind = Scalar(*kind_node, "kind");
    const std::string lower = text::ToLower(kind);
    const int line = kind_node->line;
    if (lower == "deployment") {
      AddUnique(set.deployments, ParseDeployment(root), "Deployment", line);
    } else if (lower == "service") {
      AddUnique(set.services, ParseService(root), "Service", line);
    } else if (lower == "virtualservice") {
      AddUnique(set.virtual_services, ParseVirtualService(root), "VirtualService", line);
    } else if (lower == "destinationrule") {
      AddUnique(set.destination_rules, ParseDestinationRule(root), "DestinationRule", line);
    } else if (lower == "configmap") {
      AddUnique(set.config_maps, ParseConfigMap(root), "ConfigMap", line);
    } else if (lower == "serviceentry") {
      AddUnique(set.service_entries, ParseServiceEntry(root), "ServiceEntry", line);
    } else if (lower == "horizontalpodautoscaler" || lower == "autoscaler") {
      AddUnique(set.autoscalers, ParseAutoscaler(root), "HorizontalPodAutoscaler", line);
    } else if (lower == "persistentvolume") {
      AddUnique(set.volumes, ParseVolume(root, "PersistentVolume"), "PersistentVolume", line);
    } else if (lower == "persistentvolumeclaim") {
      AddUnique(set.volumes, ParseVolume(root, "PersistentVolumeClaim"),
                "PersistentVolumeClaim", line);
    } else {
      throw Error(ErrorCode::kUnknownKind,
                  fmt::format("line {}: unknown kind '{}'", line, kind));
    }
  }
  return set;
}

ManifestSet LoadManifestFile(const std::string& path) {
  try {
    return ParseManifest(text::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Node S(std::string_view v) { return Node::Scalar(std::string(v)); }
Node I(long long v) { return Node::Scalar(std::to_string(v)); }

Node LabelsNode(const Labels& labels) {
  Node n = Node::Map();
  for (const auto& [k, v] : labels) n.Add(k, S(v));
  return n;
}

Node Header(std::string_view api_version, std::string_view kind) {
  Node doc = Node::Map();
  if (!api_version.empty()) doc.Add("apiVersion", S(api_version));
  doc.Add("kind", S(kind));
  return doc;
}

Node Metadata(std::string_view name, const Labels& labels = {}) {
  Node meta = Node::Map();
  meta.Add("name", S(name));
  if (!labels.empty()) meta.Add("labels", LabelsNode(labels));
  return meta;
}

Node RetryNode(const RetryPolicy& retry) {
  Node n = Node::Map();
  n.Add("attempts", I(retry.attempts));
  n.Add("perTryTimeout", S(std::to_string(retry.per_try_timeout) + "ms"));
  return n;
}

Node TemplateNode(const PodTemplate& t) {
  Node tmpl = Node::Map();
  Node meta = Node::Map();
  if (!t.labels.empty()) meta.Add("labels", LabelsNode(t.labels));
  if (!t.annotations.empty()) meta.Add("annotations", LabelsNode(t.annotations));
  if (!meta.entries.empty()) tmpl.Add("metadata", std::move(meta));

  Node container = Node::Map();
  if (!t.container_name.empty()) container.Add("name", S(t.container_name));
  if (!t.image.empty()) container.Add("image", S(t.image));
  if (t.container_port != 0) {
    Node ports = Node::List();
    Node port = Node::Map();
    port.Add("containerPort", I(t.container_port));
    ports.Push(std::move(port));
    container.Add("ports", std::move(ports));
  }
  if (!t.env.empty()) {
    Node env = Node::List();
    for (const auto& var : t.env) {
      Node item = Node::Map();
      item.Add("name", S(var.name));
      if (!var.config_map.empty()) {
        Node ref = Node::Map();
        ref.Add("name", S(var.config_map));
        if (!var.config_key.empty()) ref.Add("key", S(var.config_key));
        Node from = Node::Map();
        from.Add("configMapKeyRef", std::move(ref));
        item.Add("valueFrom", std::move(from));
      } else {
        item.Add("value", S(var.value));
      }
      env.Push(std::move(item));
    }
    container.Add("env", std::move(env));
  }
  if (!t.env_from.empty()) {
    Node env_from = Node::List();
    for (const auto& name : t.env_from) {
      Node ref = Node::Map();
      ref.Add("name", S(name));
      Node item = Node::Map();
      item.Add("configMapRef", std::move(ref));
      env_from.Push(std::move(item));
    }
    container.Add("envFrom", std::move(env_from));
  }
  Node spec = Node::Map();
  if (!container.entries.empty()) {
    Node containers = Node::List();
    containers.Push(std::move(container));
    spec.Add("containers", std::move(containers));
  }
  if (!t.volume_claims.empty()) {
    Node volumes = Node::List();
    for (const auto& claim : t.volume_claims) {
      Node pvc = Node::Map();
      pvc.Add("claimName", S(claim));
      Node vol = Node::Map();
      vol.Add("name", S(claim));
      vol.Add("persistentVolumeClaim", std::move(pvc));
      volumes.Push(std::move(vol));
    }
    spec.Add("volumes", std::move(volumes));
  }
  if (!t.restart_policy.empty()) spec.Add("restartPolicy", S(t.restart_policy));
  if (!spec.entries.empty()) tmpl.Add("spec", std::move(spec));
  return tmpl;
}

Node DeploymentNode(const DeploymentSpec& d) {
  Node doc = Header(d.api_version, "Deployment");
  doc.Add("metadata", Metadata(d.name, d.labels));
  Node spec = Node::Map();
  spec.Add("replicas", I(d.replicas));
  if (!d.selector.empty()) {
    Node selector = Node::Map();
    selector.Add("matchLabels", LabelsNode(d.selector));
    spec.Add("selector", std::move(selector));
  }
  spec.Add("template", TemplateNode(d.pod_template));
  doc.Add("spec", std::move(spec));
  return doc;
}

Node ServiceNode(const ServiceSpec& s) {
  Node doc = Header(s.api_version, "Service");
  doc.Add("metadata", Metadata(s.name, s.labels));
  Node spec = Node::Map();
  spec.Add("type", S(ServiceTypeName(s.type)));
  if (!s.ports.empty()) {
    Node ports = Node::List();
    for (const auto& p : s.ports) {
      Node port = Node::Map();
      port.Add("port", I(p.port));
      port.Add("targetPort", I(p.target_port));
      port.Add("protocol", S(p.protocol));
      if (!p.name.empty()) port.Add("name", S(p.name));
      ports.Push(std::move(port));
    }
    spec.Add("ports", std::move(ports));
  }
  if (!s.selector.empty()) spec.Add("selector", LabelsNode(s.selector));
  doc.Add("spec", std::move(spec));
  return doc;
}

std::string_view MatchModeName(MatchMode mode) {
  switch (mode) {
    case MatchMode::kExact: return "exact";
    case MatchMode::kPrefix: return "prefix";
    case MatchMode::kRegex: return "regex";
  }
  return "regex";
}

Node VirtualServiceNode(const VirtualServiceSpec& vs) {
  Node doc = Header(vs.api_version, "VirtualService");
  doc.Add("metadata", Metadata(vs.name));
  Node spec = Node::Map();
  Node hosts = Node::List();
  for (const auto& h : vs.hosts) hosts.Push(S(h));
  spec.Add("hosts", std::move(hosts));
  Node http = Node::List();
  for (const auto& r : vs.http) {
    Node item = Node::Map();
    if (!r.match.empty()) {
      Node match = Node::List();
      for (const auto& clause : r.match) {
        Node headers = Node::Map();
        for (const auto& h : clause.headers) {
          Node m = Node::Map();
          m.Add(std::string(MatchModeName(h.mode)), S(h.pattern));
          headers.Add(h.header, std::move(m));
        }
        Node c = Node::Map();
        c.Add("headers", std::move(headers));
        match.Push(std::move(c));
      }
      item.Add("match", std::move(match));
    }
    Node route = Node::List();
    for (const auto& d : r.route) {
      Node dest = Node::Map();
      dest.Add("host", S(d.host));
      if (!d.subset.empty()) dest.Add("subset", S(d.subset));
      Node entry = Node::Map();
      entry.Add("destination", std::move(dest));
      if (d.weight) entry.Add("weight", I(*d.weight));
      if (d.retry) entry.Add("retries", RetryNode(*d.retry));
      route.Push(std::move(entry));
    }
    item.Add("route", std::move(route));
    http.Push(std::move(item));
  }
  spec.Add("http", std::move(http));
  doc.Add("spec", std::move(spec));
  return doc;
}

Node DestinationRuleNode(const DestinationRuleSpec& dr) {
  Node doc = Header(dr.api_version, "DestinationRule");
  doc.Add("metadata", Metadata(dr.name));
  Node spec = Node::Map();
  spec.Add("host", S(dr.host));
  Node subsets = Node::List();
  for (const auto& s : dr.subsets) {
    Node subset = Node::Map();
    subset.Add("name", S(s.name));
    if (!s.labels.empty()) subset.Add("labels", LabelsNode(s.labels));
    subsets.Push(std::move(subset));
  }
  spec.Add("subsets", std::move(subsets));
  doc.Add("spec", std::move(spec));
  return doc;
}

Node ConfigMapNode(const ConfigMapSpec& cm) {
  Node doc = Header(cm.api_version, "ConfigMap");
  doc.Add("metadata", Metadata(cm.name));
  Node data = Node::Map();
  for (const auto& [k, v] : cm.entries) data.Add(k, S(v));
  doc.Add("data", std::move(data));
  return doc;
}

Node ServiceEntryNode(const ServiceEntrySpec& se) {
  Node doc = Header(se.api_version, "ServiceEntry");
  doc.Add("metadata", Metadata(se.name));
  Node spec = Node::Map();
  Node hosts = Node::List();
  hosts.Push(S(se.external_host));
  spec.Add("hosts", std::move(hosts));
  doc.Add("spec", std::move(spec));
  return doc;
}

Node AutoscalerNode(const AutoscalerSpec& as) {
  Node doc = Header(as.api_version, "HorizontalPodAutoscaler");
  doc.Add("metadata", Metadata(as.name));
  Node spec = Node::Map();
  Node target = Node::Map();
  target.Add("name", S(as.deployment));
  spec.Add("scaleTargetRef", std::move(target));
  spec.Add("minReplicas", I(as.min));
  spec.Add("maxReplicas", I(as.max));
  spec.Add("threshold", I(as.threshold));
  doc.Add("spec", std::move(spec));
  return doc;
}

Node VolumeNode(const VolumeSpec& v) {
  Node doc = Header(v.api_version, v.kind);
  doc.Add("metadata", Metadata(v.name));
  return doc;
}

}  // namespace

std::string SerializeManifest(const ManifestSet& set) {
  std::vector<Node> docs;
  for (const auto& x : set.deployments) docs.push_back(DeploymentNode(x));
  for (const auto& x : set.services) docs.push_back(ServiceNode(x));
  for (const auto& x : set.virtual_services) docs.push_back(VirtualServiceNode(x));
  for (const auto& x : set.destination_rules) docs.push_back(DestinationRuleNode(x));
  for (const auto& x : set.config_maps) docs.push_back(ConfigMapNode(x));
  for (const auto& x : set.service_entries) docs.push_back(ServiceEntryNode(x));
  for (const auto& x : set.autoscalers) docs.push_back(AutoscalerNode(x));
  for (const auto& x : set.volumes) docs.push_back(VolumeNode(x));
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out += "---\n";
    out += yaml::Emit(docs[i]);
  }
  return out;
}

std::string CanonicalTemplate(const PodTemplate& pod_template) {
  return yaml::Emit(TemplateNode(pod_template));
}

}  // namespace meshsim
