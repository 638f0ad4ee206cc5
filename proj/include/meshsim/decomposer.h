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

#ifndef MESHSIM_DECOMPOSER_H
#define MESHSIM_DECOMPOSER_H

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/manifest.h"

namespace meshsim {

enum class UnitKind { kServiceLogic, kDomainObject, kRepository, kController };
std::string_view UnitKindName(UnitKind kind);

struct CodeUnit {
  std::string name;
  UnitKind kind = UnitKind::kServiceLogic;
  std::vector<std::string> functions;
  bool frontend = false;
};

struct CallEdge {
  std::string from;
  std::string to;
  std::string label;
};

struct DataEdge {
  std::string unit;
  std::string datastore;
  std::string label;
};

struct ServiceGraph {
  std::vector<CodeUnit> units;
  std::vector<CallEdge> calls;
  std::vector<DataEdge> data;

  const CodeUnit* Find(std::string_view name) const;
  // Throws ParseError when an edge names an undeclared unit or a datastore
  // id is empty.
  void CheckWellFormed() const;
};

// `name,kind,functions;semicolon;separated,frontend` and
// `from,to,kind[call|data],label`. Header rows are optional.
ServiceGraph ParseServiceGraph(std::string_view units_csv, std::string_view edges_csv);

enum class ObjectRole { kPrimary, kHelper };

struct Classification {
  std::map<std::string, ObjectRole> roles;
  std::vector<std::string> unreferenced;  // helpers without any edge
};

Classification ClassifyObjects(const ServiceGraph& graph);

struct AtomicService {
  std::string name;
  std::vector<std::string> members;
  std::string datastore;

  bool operator==(const AtomicService&) const = default;
};

struct AggregatedService {
  std::string name;
  std::vector<std::string> members;
  std::vector<std::string> downstream;

  bool operator==(const AggregatedService&) const = default;
};

struct HelperCopy {
  std::string helper;
  std::string service;

  bool operator==(const HelperCopy&) const = default;
};

struct ServicePlan {
  std::vector<AtomicService> atomic;
  std::vector<AggregatedService> aggregated;
  std::vector<std::string> bff;
  std::map<std::string, int> hierarchy;  // platform is level 0
  std::vector<HelperCopy> helper_copies;
  std::vector<std::string> unassigned;
  std::vector<std::string> warnings;

  // Service of a non-helper unit, or empty.
  std::string ServiceOf(std::string_view unit) const;
  std::vector<std::string> ServiceNames() const;
  // Distinct levels including the platform.
  int Layers() const;

  bool operator==(const ServicePlan&) const = default;
};

// Throws UnassignableUnit when a service unit owns two or more datastores;
// the message lists the functions reaching each one.
ServicePlan ProposeServices(const ServiceGraph& graph);

struct Violation {
  std::string code;  // SameHierarchyCall, CrossDomainData, ActionWithoutGateway
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> FindViolations(const ServiceGraph& graph, const ServicePlan& plan);

// Deployments, DestinationRules and VirtualServices with retry blocks
// derived from the plan's layer count.
ManifestSet PlanManifests(const ServicePlan& plan);
std::string RenderViolations(const ServicePlan& plan,
                             const std::vector<Violation>& violations);
std::string RenderPlanSummary(const ServicePlan& plan);

}  // namespace meshsim

#endif  // MESHSIM_DECOMPOSER_H
