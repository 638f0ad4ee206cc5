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

#include "meshsim/decomposer.h"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

#include "meshsim/budget.h"
#include "meshsim/error.h"
#include "text.h"

namespace meshsim {

std::string_view UnitKindName(UnitKind kind) {
  switch (kind) {
    case UnitKind::kServiceLogic: return "ServiceLogic";
    case UnitKind::kDomainObject: return "DomainObject";
    case UnitKind::kRepository: return "Repository";
    case UnitKind::kController: return "Controller";
  }
  return "Unknown";
}

namespace {

UnitKind ParseUnitKind(std::string_view s, std::size_t line) {
  const std::string v = text::ToLower(text::Trim(s));
  if (v == "servicelogic" || v == "service") return UnitKind::kServiceLogic;
  if (v == "domainobject" || v == "domain") return UnitKind::kDomainObject;
  if (v == "repository") return UnitKind::kRepository;
  if (v == "controller") return UnitKind::kController;
  throw Error(ErrorCode::kParseError, fmt::format("units line {}: unknown kind '{}'", line, s));
}

bool ParseFlag(std::string_view s) {
  const std::string v = text::ToLower(text::Trim(s));
  return v == "true" || v == "yes" || v == "1" || v == "frontend";
}

template <typename T>
void SortUnique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string ServiceName(std::string_view unit) {
  std::string name = text::ToLower(unit);
  if (name.size() > 7 && text::EndsWith(name, "service")) name.resize(name.size() - 7);
  return name;
}

// Datastores a unit reaches: its own data edges plus those of repositories
// it calls. Values are the function labels on the reaching edges.
std::map<std::string, std::set<std::string>> Reach(const ServiceGraph& g,
                                                   std::string_view unit) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& d : g.data) {
    if (d.unit == unit) out[d.datastore].insert(d.label);
  }
  for (const auto& c : g.calls) {
    if (c.from != unit) continue;
    const CodeUnit* callee = g.Find(c.to);
    if (callee == nullptr || callee->kind != UnitKind::kRepository) continue;
    for (const auto& d : g.data) {
      if (d.unit == callee->name) out[d.datastore].insert(c.label);
    }
  }
  return out;
}

}  // namespace

const CodeUnit* ServiceGraph::Find(std::string_view name) const {
  for (const auto& u : units) {
    if (u.name == name) return &u;
  }
  return nullptr;
}

void ServiceGraph::CheckWellFormed() const {
  if (units.empty()) throw Error(ErrorCode::kParseError, "no units declared");
  std::set<std::string> seen;
  for (const auto& u : units) {
    if (!seen.insert(u.name).second) {
      throw Error(ErrorCode::kDuplicateName, fmt::format("unit '{}' declared twice", u.name));
    }
  }
  for (const auto& c : calls) {
    if (!Find(c.from) || !Find(c.to)) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("call edge {} -> {} names an undeclared unit", c.from, c.to));
    }
  }
  for (const auto& d : data) {
    if (!Find(d.unit)) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("data edge names undeclared unit '{}'", d.unit));
    }
    if (d.datastore.empty()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("data edge from '{}' has an empty datastore id", d.unit));
    }
  }
}

ServiceGraph ParseServiceGraph(std::string_view units_csv, std::string_view edges_csv) {
  ServiceGraph g;
  const auto unit_lines = text::SplitLines(units_csv);
  for (std::size_t n = 0; n < unit_lines.size(); ++n) {
    const std::string_view line = text::Trim(unit_lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, ',');
    if (f.size() < 2 || f.size() > 4) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("units line {}: expected name,kind,functions,frontend", n + 1));
    }
    if (text::ToLower(text::Trim(f[0])) == "name" && text::ToLower(text::Trim(f[1])) == "kind") {
      continue;
    }
    CodeUnit u;
    u.name = std::string(text::Trim(f[0]));
    if (u.name.empty()) {
      throw Error(ErrorCode::kParseError, fmt::format("units line {}: empty name", n + 1));
    }
    u.kind = ParseUnitKind(f[1], n + 1);
    if (f.size() > 2) {
      for (const auto& fn : text::Split(f[2], ';')) {
        if (!text::Trim(fn).empty()) u.functions.emplace_back(text::Trim(fn));
      }
    }
    if (f.size() > 3) u.frontend = ParseFlag(f[3]);
    g.units.push_back(std::move(u));
  }
  const auto edge_lines = text::SplitLines(edges_csv);
  for (std::size_t n = 0; n < edge_lines.size(); ++n) {
    const std::string_view line = text::Trim(edge_lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, ',');
    if (f.size() < 3 || f.size() > 4) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("edges line {}: expected from,to,kind,label", n + 1));
    }
    const std::string kind = text::ToLower(text::Trim(f[2]));
    if (text::Trim(f[0]) == "from" && kind == "kind") continue;
    std::string label = f.size() > 3 ? std::string(text::Trim(f[3])) : std::string();
    if (kind == "call" || kind == "use") {
      g.calls.push_back({std::string(text::Trim(f[0])), std::string(text::Trim(f[1])),
                         std::move(label)});
    } else if (kind == "data") {
      g.data.push_back({std::string(text::Trim(f[0])), std::string(text::Trim(f[1])),
                        std::move(label)});
    } else {
      throw Error(ErrorCode::kParseError,
                  fmt::format("edges line {}: kind must be call or data, got '{}'", n + 1,
                              f[2]));
    }
  }
  g.CheckWellFormed();
  return g;
}

Classification ClassifyObjects(const ServiceGraph& g) {
  Classification out;
  for (const auto& u : g.units) {
    const bool helper = u.kind == UnitKind::kDomainObject && u.functions.empty();
    out.roles[u.name] = helper ? ObjectRole::kHelper : ObjectRole::kPrimary;
    if (!helper) continue;
    const bool referenced =
        std::any_of(g.calls.begin(), g.calls.end(),
                    [&](const CallEdge& c) { return c.to == u.name || c.from == u.name; }) ||
        std::any_of(g.data.begin(), g.data.end(),
                    [&](const DataEdge& d) { return d.unit == u.name; });
    if (!referenced) out.unreferenced.push_back(u.name);
  }
  return out;
}

std::string ServicePlan::ServiceOf(std::string_view unit) const {
  for (const auto& s : atomic) {
    if (std::find(s.members.begin(), s.members.end(), unit) != s.members.end()) return s.name;
  }
  for (const auto& s : aggregated) {
    if (std::find(s.members.begin(), s.members.end(), unit) != s.members.end()) return s.name;
  }
  return {};
}

std::vector<std::string> ServicePlan::ServiceNames() const {
  std::vector<std::string> names;
  for (const auto& s : atomic) names.push_back(s.name);
  for (const auto& s : aggregated) names.push_back(s.name);
  std::sort(names.begin(), names.end());
  return names;
}

int ServicePlan::Layers() const {
  std::set<int> levels{0};
  for (const auto& [_, level] : hierarchy) levels.insert(level);
  return static_cast<int>(levels.size());
}

ServicePlan ProposeServices(const ServiceGraph& graph) {
  graph.CheckWellFormed();
  ServiceGraph g = graph;
  std::sort(g.units.begin(), g.units.end(),
            [](const CodeUnit& a, const CodeUnit& b) { return a.name < b.name; });
  const Classification roles = ClassifyObjects(g);
  ServicePlan plan;
  for (const auto& h : roles.unreferenced) {
    plan.warnings.push_back(fmt::format("Unreferenced: helper '{}' has no edges", h));
  }

  // Datastore ownership among service-logic units.
  std::map<std::string, std::map<std::string, std::set<std::string>>> reach;
  std::map<std::string, std::vector<std::string>> touchers;
  for (const auto& u : g.units) {
    if (u.kind != UnitKind::kServiceLogic) continue;
    reach[u.name] = Reach(g, u.name);
    for (const auto& [store, _] : reach[u.name]) touchers[store].push_back(u.name);
  }
  std::map<std::string, std::string> owner;  // datastore -> unit
  for (const auto& [store, units] : touchers) {
    if (units.size() == 1) {
      owner[store] = units.front();
      continue;
    }
    std::vector<std::string> sole;
    for (const auto& u : units) {
      if (reach[u].size() == 1) sole.push_back(u);
    }
    owner[store] = sole.empty() ? units.front() : sole.front();
  }
  std::map<std::string, std::vector<std::string>> owned;  // unit -> datastores
  for (const auto& [store, unit] : owner) owned[unit].push_back(store);

  for (const auto& [unit, stores] : owned) {
    if (stores.size() < 2) continue;
    std::vector<std::string> groups;
    for (const auto& store : stores) {
      const auto& fns = reach[unit][store];
      groups.push_back(fmt::format(
          "{}{{{}}}", store, text::Join(std::vector<std::string>(fns.begin(), fns.end()), ",")));
    }
    throw Error(ErrorCode::kUnassignableUnit,
                fmt::format("'{}' owns {} datastores; split into {}", unit, stores.size(),
                            text::Join(groups, "; ")));
  }

  std::map<std::string, std::string> service_of;  // unit -> service
  for (const auto& u : g.units) {
    if (u.kind != UnitKind::kServiceLogic) continue;
    auto it = owned.find(u.name);
    if (it != owned.end()) {
      AtomicService s{it->second.front(), {u.name}, it->second.front()};
      service_of[u.name] = s.name;
      plan.atomic.push_back(std::move(s));
    } else if (reach[u.name].empty()) {
      AggregatedService s{ServiceName(u.name), {u.name}, {}};
      service_of[u.name] = s.name;
      plan.aggregated.push_back(std::move(s));
    } else {
      // Touches only datastores owned elsewhere; reported as cross-domain.
      plan.unassigned.push_back(u.name);
    }
  }

  auto add_member = [&](const std::string& service, const std::string& unit) {
    service_of[unit] = service;
    for (auto& s : plan.atomic) {
      if (s.name == service) s.members.push_back(unit);
    }
    for (auto& s : plan.aggregated) {
      if (s.name == service) s.members.push_back(unit);
    }
  };
  auto is_aggregated = [&](const std::string& service) {
    return std::any_of(plan.aggregated.begin(), plan.aggregated.end(),
                       [&](const AggregatedService& s) { return s.name == service; });
  };
  // Aggregated callees win so that entry points sit behind the BFF.
  auto first_callee_service = [&](const std::string& unit) -> std::string {
    std::vector<std::string> services;
    for (const auto& c : g.calls) {
      if (c.from != unit) continue;
      if (auto it = service_of.find(c.to); it != service_of.end()) services.push_back(it->second);
    }
    SortUnique(services);
    auto agg = std::find_if(services.begin(), services.end(), is_aggregated);
    if (agg != services.end()) return *agg;
    return services.empty() ? std::string() : services.front();
  };
  auto first_caller_service = [&](const std::string& unit) -> std::string {
    std::vector<std::string> services;
    for (const auto& c : g.calls) {
      if (c.to != unit) continue;
      if (auto it = service_of.find(c.from); it != service_of.end()) services.push_back(it->second);
    }
    SortUnique(services);
    return services.empty() ? std::string() : services.front();
  };

  for (const auto& u : g.units) {
    if (u.kind != UnitKind::kRepository) continue;
    std::string service;
    for (const auto& d : g.data) {
      if (d.unit != u.name) continue;
      auto it = owner.find(d.datastore);
      if (it != owner.end() && service_of.contains(it->second)) {
        service = service_of[it->second];
        break;
      }
    }
    if (service.empty()) service = first_caller_service(u.name);
    if (service.empty()) {
      plan.unassigned.push_back(u.name);
    } else {
      add_member(service, u.name);
    }
  }
  for (const auto& u : g.units) {
    if (u.kind != UnitKind::kController) continue;
    const std::string service = first_callee_service(u.name);
    if (service.empty()) {
      plan.unassigned.push_back(u.name);
    } else {
      add_member(service, u.name);
    }
  }
  for (const auto& u : g.units) {
    if (u.kind != UnitKind::kDomainObject) continue;
    if (roles.roles.at(u.name) == ObjectRole::kHelper) {
      std::vector<std::string> users;
      for (const auto& c : g.calls) {
        if (c.to != u.name) continue;
        if (auto it = service_of.find(c.from); it != service_of.end()) users.push_back(it->second);
      }
      SortUnique(users);
      for (const auto& s : users) plan.helper_copies.push_back({u.name, s});
      continue;
    }
    const std::string service = first_caller_service(u.name);
    if (service.empty()) {
      plan.unassigned.push_back(u.name);
    } else {
      add_member(service, u.name);
    }
  }

  // Service-level call graph.
  std::map<std::string, std::set<std::string>> downstream;
  for (const auto& c : g.calls) {
    auto from = service_of.find(c.from);
    auto to = service_of.find(c.to);
    if (from == service_of.end() || to == service_of.end()) continue;
    if (from->second != to->second) downstream[from->second].insert(to->second);
  }
  std::set<std::string> aggregated_names;
  for (auto& s : plan.aggregated) {
    aggregated_names.insert(s.name);
    const auto& ds = downstream[s.name];
    s.downstream.assign(ds.begin(), ds.end());
    const bool exposed = std::any_of(s.members.begin(), s.members.end(), [&](const auto& m) {
      const CodeUnit* unit = g.Find(m);
      return unit != nullptr && unit->frontend;
    });
    if (exposed) plan.bff.push_back(s.name);
  }

  // Longest path from the top, following edges out of aggregated services.
  std::map<std::string, int> indegree;
  for (const auto& name : plan.ServiceNames()) indegree[name] = 0;
  for (const auto& from : aggregated_names) {
    for (const auto& to : downstream[from]) ++indegree[to];
  }
  std::vector<std::string> ready;
  for (const auto& [name, d] : indegree) {
    if (d == 0) {
      ready.push_back(name);
      plan.hierarchy[name] = 1;
    }
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::string node = ready.back();
    ready.pop_back();
    ++visited;
    if (!aggregated_names.contains(node)) continue;
    for (const auto& to : downstream[node]) {
      plan.hierarchy[to] = std::max(plan.hierarchy[to], plan.hierarchy[node] + 1);
      if (--indegree[to] == 0) ready.push_back(to);
    }
  }
  if (visited != indegree.size()) {
    throw Error(ErrorCode::kCyclicTopology, "aggregated services call each other in a cycle");
  }
  for (auto& s : plan.atomic) std::sort(s.members.begin(), s.members.end());
  for (auto& s : plan.aggregated) std::sort(s.members.begin(), s.members.end());
  std::sort(plan.atomic.begin(), plan.atomic.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(plan.aggregated.begin(), plan.aggregated.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  SortUnique(plan.bff);
  SortUnique(plan.unassigned);
  return plan;
}

std::vector<Violation> FindViolations(const ServiceGraph& g, const ServicePlan& plan) {
  std::vector<Violation> out;
  std::set<std::pair<std::string, std::string>> reported;
  for (const auto& c : g.calls) {
    const std::string from = plan.ServiceOf(c.from);
    const std::string to = plan.ServiceOf(c.to);
    if (from.empty() || to.empty() || from == to) continue;
    auto lf = plan.hierarchy.find(from);
    auto lt = plan.hierarchy.find(to);
    if (lf == plan.hierarchy.end() || lt == plan.hierarchy.end()) continue;
    if (lf->second == lt->second && reported.insert({from, to}).second) {
      out.push_back({"SameHierarchyCall",
                     fmt::format("{} ({}) calls {} ({}), both at level {}", c.from, from,
                                 c.to, to, lf->second)});
    }
  }
  std::map<std::string, std::string> store_owner;
  for (const auto& s : plan.atomic) store_owner[s.datastore] = s.name;
  std::set<std::pair<std::string, std::string>> cross;
  for (const auto& u : g.units) {
    const std::string service = plan.ServiceOf(u.name);
    for (const auto& [store, _] : Reach(g, u.name)) {
      auto it = store_owner.find(store);
      if (it == store_owner.end() || it->second == service) continue;
      if (cross.insert({u.name, store}).second) {
        out.push_back({"CrossDomainData",
                       fmt::format("{} ({}) touches datastore '{}' owned by {}", u.name,
                                   service.empty() ? "unassigned" : service, store,
                                   it->second)});
      }
    }
  }
  std::set<std::string> atomic_names;
  for (const auto& s : plan.atomic) atomic_names.insert(s.name);
  std::set<std::string> gateway_flagged;
  for (const auto& s : plan.atomic) {
    for (const auto& m : s.members) {
      const CodeUnit* unit = g.Find(m);
      if (unit != nullptr && unit->frontend && gateway_flagged.insert(m).second) {
        out.push_back({"ActionWithoutGateway",
                       fmt::format("frontend reaches {} in atomic service {} directly", m,
                                   s.name)});
      }
    }
  }
  for (const auto& c : g.calls) {
    const CodeUnit* from = g.Find(c.from);
    if (from == nullptr || !from->frontend || gateway_flagged.contains(c.from)) continue;
    const std::string to = plan.ServiceOf(c.to);
    if (!atomic_names.contains(to) || plan.ServiceOf(c.from) == to) continue;
    gateway_flagged.insert(c.from);
    out.push_back({"ActionWithoutGateway",
                   fmt::format("frontend unit {} calls {} in atomic service {} directly",
                               c.from, c.to, to)});
  }
  return out;
}

ManifestSet PlanManifests(const ServicePlan& plan) {
  BudgetInputs inputs;
  inputs.layers = plan.Layers();
  const BudgetResult budget = SolveBudget(inputs);
  const RetryPolicy retry = MakeRetryPolicy(budget);
  ManifestSet set;
  for (const auto& name : plan.ServiceNames()) {
    DeploymentSpec d;
    d.api_version = "apps/v1";
    d.name = name;
    d.labels = {{"app", name}};
    d.replicas = 1;
    d.selector = {{"app", name}};
    d.pod_template.labels = {{"app", name}, {std::string(kVersionLabel), "v1"}};
    d.pod_template.container_name = name;
    d.pod_template.image = name + ":v1";
    d.pod_template.container_port = 8080;
    set.deployments.push_back(std::move(d));

    DestinationRuleSpec dr;
    dr.api_version = "networking.istio.io/v1alpha3";
    dr.name = name;
    dr.host = name;
    dr.subsets.push_back({"v1", {{std::string(kVersionLabel), "v1"}}});
    set.destination_rules.push_back(std::move(dr));

    VirtualServiceSpec vs;
    vs.api_version = "networking.istio.io/v1alpha3";
    vs.name = name;
    vs.hosts = {name};
    HttpRoute route;
    route.route.push_back({name, "v1", std::nullopt, retry});
    vs.http.push_back(std::move(route));
    set.virtual_services.push_back(std::move(vs));
  }
  return set;
}

std::string RenderViolations(const ServicePlan& plan, const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) out += fmt::format("ERROR {}: {}\n", v.code, v.message);
  for (const auto& w : plan.warnings) out += fmt::format("WARN {}\n", w);
  return out;
}

std::string RenderPlanSummary(const ServicePlan& plan) {
  std::string out;
  for (const auto& s : plan.atomic) {
    out += fmt::format("atomic      {:<12} level {}  datastore {}  members {}\n", s.name,
                       plan.hierarchy.at(s.name), s.datastore, text::Join(s.members, ","));
  }
  for (const auto& s : plan.aggregated) {
    const bool bff = std::find(plan.bff.begin(), plan.bff.end(), s.name) != plan.bff.end();
    out += fmt::format("{:<12}{:<12} level {}  calls {}  members {}\n",
                       bff ? "bff" : "aggregated", s.name, plan.hierarchy.at(s.name),
                       s.downstream.empty() ? "-" : text::Join(s.downstream, ","),
                       text::Join(s.members, ","));
  }
  for (const auto& h : plan.helper_copies) {
    out += fmt::format("helper      {:<12} copied into {}\n", h.helper, h.service);
  }
  if (!plan.unassigned.empty()) {
    out += fmt::format("unassigned  {}\n", text::Join(plan.unassigned, ","));
  }
  out += fmt::format("layers      {}\n", plan.Layers());
  return out;
}

}  // namespace meshsim
