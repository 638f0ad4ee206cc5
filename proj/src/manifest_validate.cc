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

#include <regex>
#include <set>

#include <fmt/format.h>

#include "meshsim/manifest.h"

namespace meshsim {

std::string Finding::Render() const {
  return fmt::format("{} {}: {} ({}/{})",
                     severity == Severity::kError ? "ERROR" : "WARN", code,
                     message, kind, name);
}

std::size_t ValidationReport::error_count() const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.severity == Severity::kError;
  return n;
}

bool ValidationReport::Has(std::string_view code) const {
  for (const auto& f : findings) {
    if (f.code == code) return true;
  }
  return false;
}

std::string ValidationReport::Render() const {
  std::string out;
  for (const auto& f : findings) out += f.Render() + "\n";
  return out;
}

namespace {

class Validator {
 public:
  Validator(const ManifestSet& set, Environment env) : set_(set), env_(env) {}

  ValidationReport Run() {
    CheckServices();
    CheckVirtualServices();
    CheckDestinationRules();
    CheckDeployments();
    CheckAutoscalers();
    CheckVolumes();
    return std::move(report_);
  }

 private:
  void Error(std::string code, std::string message, std::string kind,
             std::string name) {
    report_.findings.push_back({Severity::kError, std::move(code),
                                std::move(message), std::move(kind),
                                std::move(name)});
  }
  void Warn(std::string code, std::string message, std::string kind,
            std::string name) {
    report_.findings.push_back({Severity::kWarn, std::move(code),
                                std::move(message), std::move(kind),
                                std::move(name)});
  }

  void CheckServices() {
    for (const auto& svc : set_.services) {
      if (svc.type == ServiceType::kNodePort) {
        Error("NodePortBanned",
              "NodePort exposure is banned; route traffic through the gateway",
              "Service", svc.name);
      } else if (svc.type == ServiceType::kLoadBalancer &&
                 env_ == Environment::kOnPremise) {
        Error("LoadBalancerOnPremise",
              "LoadBalancer services need a cloud load balancer; not "
              "available on-premise",
              "Service", svc.name);
      }
    }
  }

  bool AnyDeploymentServes(std::string_view host, std::string_view version) const {
    for (const auto& d : set_.deployments) {
      if (!ServesHost(d, host, set_.services)) continue;
      if (version.empty() || d.pod_template.version() == version) return true;
    }
    return false;
  }

  void CheckVirtualServices() {
    for (const auto& vs : set_.virtual_services) {
      for (const auto& route : vs.http) {
        bool any_weight = false;
        int weight_sum = 0;
        for (const auto& dest : route.route) {
          if (dest.weight) {
            any_weight = true;
            weight_sum += *dest.weight;
          }
          CheckDestination(vs, dest);
        }
        if (any_weight && weight_sum != 100) {
          Error("WeightSum",
                fmt::format("route weights sum to {}, expected 100", weight_sum),
                "VirtualService", vs.name);
        }
        for (const auto& clause : route.match) {
          for (const auto& h : clause.headers) {
            if (h.mode != MatchMode::kRegex) continue;
            try {
              std::regex re(h.pattern, std::regex::ECMAScript);
            } catch (const std::regex_error&) {
              Error("InvalidRegex",
                    fmt::format("header '{}' regex does not compile", h.header),
                    "VirtualService", vs.name);
            }
          }
        }
      }
    }
  }

  void CheckDestination(const VirtualServiceSpec& vs, const RouteDestination& dest) {
    if (dest.subset.empty()) {
      if (!AnyDeploymentServes(dest.host, "")) {
        Error("UnknownHost",
              fmt::format("no deployment serves host '{}'", dest.host),
              "VirtualService", vs.name);
      }
      return;
    }
    const DestinationRuleSpec* dr = set_.FindDestinationRule(dest.host);
    const SubsetSpec* subset = dr ? dr->FindSubset(dest.subset) : nullptr;
    if (subset == nullptr) {
      Error("UnknownSubset",
            fmt::format("subset '{}' of host '{}' is not declared by a "
                        "destination rule",
                        dest.subset, dest.host),
            "VirtualService", vs.name);
      return;
    }
    const std::string version = subset->version();
    if (!AnyDeploymentServes(dest.host, version)) {
      Error("NoMatchingPods",
            fmt::format("no deployment of host '{}' carries version '{}'",
                        dest.host, version),
            "VirtualService", vs.name);
    }
  }

  void CheckDestinationRules() {
    for (const auto& dr : set_.destination_rules) {
      std::set<std::string> seen;
      for (const auto& s : dr.subsets) {
        if (!seen.insert(s.name).second) {
          Error("DuplicateSubset",
                fmt::format("subset '{}' declared twice", s.name),
                "DestinationRule", dr.name);
        }
      }
    }
  }

  void CheckDeployments() {
    for (const auto& d : set_.deployments) {
      for (const auto& ref : d.pod_template.ConfigMapRefs()) {
        if (set_.FindConfigMap(ref) == nullptr) {
          Error("UndefinedConfigMap",
                fmt::format("references undefined config map '{}'", ref),
                "Deployment", d.name);
        }
      }
      for (const auto& var : d.pod_template.env) {
        if (var.config_map.empty() || var.config_key.empty()) continue;
        const ConfigMapSpec* cm = set_.FindConfigMap(var.config_map);
        if (cm != nullptr && !cm->entries.contains(var.config_key)) {
          Error("UndefinedConfigKey",
                fmt::format("config map '{}' has no key '{}'", var.config_map,
                            var.config_key),
                "Deployment", d.name);
        }
      }
      for (const auto& claim : d.pod_template.volume_claims) {
        Warn("StatefulInStateless",
             fmt::format("persistent volume claim '{}' stores state in "
                         "stateless pods",
                         claim),
             "Deployment", d.name);
      }
    }
  }

  void CheckAutoscalers() {
    for (const auto& as : set_.autoscalers) {
      if (set_.FindDeployment(as.deployment) == nullptr) {
        Error("UnknownDeployment",
              fmt::format("autoscaler targets undefined deployment '{}'",
                          as.deployment),
              "HorizontalPodAutoscaler", as.name);
      }
      if (as.min > as.max) {
        Error("AutoscalerBounds",
              fmt::format("min {} exceeds max {}", as.min, as.max),
              "HorizontalPodAutoscaler", as.name);
      }
    }
  }

  void CheckVolumes() {
    for (const auto& v : set_.volumes) {
      Warn("StatefulInStateless",
           "persistent volumes store state in stateless infrastructure", v.kind,
           v.name);
    }
  }

  const ManifestSet& set_;
  Environment env_;
  ValidationReport report_;
};

}  // namespace

ValidationReport Validate(const ManifestSet& set, Environment environment) {
  return Validator(set, environment).Run();
}

}  // namespace meshsim
