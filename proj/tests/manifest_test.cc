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

#include <string>

#include <gtest/gtest.h>

#include "meshsim/error.h"

namespace meshsim {
namespace {

std::string Fixture(const std::string& name) {
  return std::string(MESHSIM_TESTDATA) + "/manifests/" + name;
}

ErrorCode ParseCode(std::string_view text) {
  try {
    ParseManifest(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(ManifestTest, ParsesDeployment) {
  const ManifestSet set = LoadManifestFile(Fixture("deployment_userapp.yaml"));
  ASSERT_EQ(set.deployments.size(), 1u);
  const DeploymentSpec& d = set.deployments[0];
  EXPECT_EQ(d.api_version, "apps/v1");
  EXPECT_EQ(d.name, "userapp-deployment");
  EXPECT_EQ(d.replicas, 3);
  EXPECT_EQ(d.labels, (Labels{{"app", "userapp"}}));
  EXPECT_EQ(d.selector, (Labels{{"app", "userapp"}}));
  EXPECT_EQ(d.pod_template.container_name, "nginx");
  EXPECT_EQ(d.pod_template.image, "userapp:latest");
  EXPECT_EQ(d.pod_template.container_port, 8080);
  EXPECT_EQ(d.pod_template.version(), kDefaultVersion);
}

TEST(ManifestTest, ParsesNodePortService) {
  const ManifestSet set = LoadManifestFile(Fixture("service_nodeport.yaml"));
  ASSERT_EQ(set.services.size(), 1u);
  const ServiceSpec& s = set.services[0];
  EXPECT_EQ(s.type, ServiceType::kNodePort);
  ASSERT_EQ(s.ports.size(), 2u);
  EXPECT_EQ(s.ports[0].port, 8080);
  EXPECT_EQ(s.ports[0].target_port, 80);
  EXPECT_EQ(s.ports[0].name, "http");
  EXPECT_EQ(s.ports[1].port, 443);
  EXPECT_EQ(s.ports[1].target_port, 443);
}

TEST(ManifestTest, ParsesWeightedVirtualService) {
  const ManifestSet set = LoadManifestFile(Fixture("virtualservice_weights.yaml"));
  ASSERT_EQ(set.virtual_services.size(), 1u);
  const auto& vs = set.virtual_services[0];
  EXPECT_EQ(vs.hosts, (std::vector<std::string>{"reviews"}));
  ASSERT_EQ(vs.http.size(), 1u);
  ASSERT_EQ(vs.http[0].route.size(), 2u);
  EXPECT_EQ(vs.http[0].route[0].subset, "v1");
  EXPECT_EQ(vs.http[0].route[0].weight, 75);
  EXPECT_EQ(vs.http[0].route[1].subset, "v2");
  EXPECT_EQ(vs.http[0].route[1].weight, 25);
}

TEST(ManifestTest, RetriesAttachToThePrecedingDestination) {
  const ManifestSet set = LoadManifestFile(Fixture("virtualservice_retries.yaml"));
  const auto& route = set.virtual_services.at(0).http.at(0).route;
  ASSERT_EQ(route.size(), 3u);
  const std::vector<std::string> hosts = {"userapp", "account", "friends"};
  for (std::size_t i = 0; i < route.size(); ++i) {
    EXPECT_EQ(route[i].host, hosts[i]);
    ASSERT_TRUE(route[i].retry.has_value());
    EXPECT_EQ(*route[i].retry, (RetryPolicy{3, 667}));
  }
}

TEST(ManifestTest, MatchRegexIsUnescaped) {
  const ManifestSet set = LoadManifestFile(Fixture("match_fragment.yaml"));
  const auto& http = set.virtual_services.at(0).http.at(0);
  ASSERT_EQ(http.match.size(), 1u);
  ASSERT_EQ(http.match[0].headers.size(), 1u);
  const HeaderMatch& h = http.match[0].headers[0];
  EXPECT_EQ(h.header, "cookie");
  EXPECT_EQ(h.mode, MatchMode::kRegex);
  EXPECT_EQ(h.pattern, "^(.*?;)?(email=[^;]*@company.com)(;.*)?$");
}

TEST(ManifestTest, ConfigMapShortForm) {
  const ManifestSet set = LoadManifestFile(Fixture("configmap_db_info.yaml"));
  ASSERT_EQ(set.config_maps.size(), 1u);
  const ConfigMapSpec& cm = set.config_maps[0];
  EXPECT_EQ(cm.name, "db_info");
  EXPECT_EQ(cm.entries.at("database"), "jdcb://db.cca.com:3306");
  EXPECT_EQ(cm.entries.at("name"), "db");
  EXPECT_EQ(cm.entries.at("password"), "-jyc9ep2");
}

TEST(ManifestTest, ConfigMapKeyRefShortForm) {
  const ManifestSet set = LoadManifestFile(Fixture("deployment_configmapref.yaml"));
  ASSERT_EQ(set.deployments.size(), 1u);
  const PodTemplate& t = set.deployments[0].pod_template;
  EXPECT_EQ(t.image, "k8s.gcr.io/busybox");
  EXPECT_EQ(t.restart_policy, "Never");
  ASSERT_EQ(t.env.size(), 1u);
  EXPECT_EQ(t.env[0].name, "SPECIAL_LEVEL_KEY");
  EXPECT_EQ(t.env[0].config_map, "db_info");
  EXPECT_TRUE(t.env[0].config_key.empty());
  EXPECT_EQ(t.ConfigMapRefs(), (std::vector<std::string>{"db_info"}));
}

TEST(ManifestTest, UnknownKindAndDuplicates) {
  try {
    LoadManifestFile(Fixture("widget.yaml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownKind);
  }
  const std::string dup =
      "kind: ConfigMap\nmetadata:\n  name: a\ndata:\n  k: v\n---\n"
      "kind: ConfigMap\nmetadata:\n  name: a\ndata:\n  k: w\n";
  EXPECT_EQ(ParseCode(dup), ErrorCode::kDuplicateName);
  EXPECT_EQ(ParseCode("kind: Deployment\nspec:\n  replicas: 1\n"), ErrorCode::kParseError);
}

TEST(ManifestTest, MergeRejectsRepeatedNames) {
  ManifestSet a = LoadManifestFile(Fixture("deployment_userapp.yaml"));
  const ManifestSet b = a;
  try {
    a.Merge(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateName);
  }
  ManifestSet c = LoadManifestFile(Fixture("service_nodeport.yaml"));
  c.Merge(b);
  EXPECT_EQ(c.deployments.size(), 1u);
  EXPECT_EQ(c.services.size(), 1u);
}

TEST(ManifestTest, ParseDuration) {
  EXPECT_EQ(ParseDuration("667ms"), 667);
  EXPECT_EQ(ParseDuration("2s"), 2000);
  EXPECT_EQ(ParseDuration("1.5s"), 1500);
  EXPECT_EQ(ParseDuration("40"), 40);
}

// Property: every fixture survives serialize/parse unchanged.
TEST(ManifestTest, SerializeRoundTripsEveryFixture) {
  const std::vector<std::string> files = {
      Fixture("deployment_userapp.yaml"),
      Fixture("service_nodeport.yaml"),
      Fixture("virtualservice_weights.yaml"),
      Fixture("virtualservice_retries.yaml"),
      Fixture("match_fragment.yaml"),
      Fixture("configmap_db_info.yaml"),
      Fixture("deployment_configmapref.yaml"),
      Fixture("loadbalancer.yaml"),
      std::string(MESHSIM_TESTDATA) + "/canary/helloworld.yaml",
      std::string(MESHSIM_TESTDATA) + "/canary/match.yaml",
      std::string(MESHSIM_TESTDATA) + "/rollover/nginx.yaml",
      std::string(MESHSIM_TESTDATA) + "/pipeline/account.yaml",
  };
  for (const auto& f : files) {
    const ManifestSet set = LoadManifestFile(f);
    const std::string text = SerializeManifest(set);
    const ManifestSet back = ParseManifest(text);
    EXPECT_EQ(back, set) << f << "\n" << text;
    EXPECT_EQ(SerializeManifest(back), text) << f;
  }
}

TEST(ManifestTest, CanonicalTemplateTracksContent) {
  const ManifestSet set = LoadManifestFile(Fixture("deployment_userapp.yaml"));
  PodTemplate t = set.deployments[0].pod_template;
  const std::string base = CanonicalTemplate(t);
  EXPECT_EQ(CanonicalTemplate(t), base);
  t.image = "userapp:2";
  EXPECT_NE(CanonicalTemplate(t), base);
}

TEST(ManifestValidateTest, NodePortIsBanned) {
  const ManifestSet set = LoadManifestFile(Fixture("service_nodeport.yaml"));
  const ValidationReport report = Validate(set, Environment::kCloud);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(report.Has("NodePortBanned"));
  EXPECT_NE(report.Render().find("ERROR NodePortBanned"), std::string::npos);
}

TEST(ManifestValidateTest, LoadBalancerDependsOnEnvironment) {
  const ManifestSet set = LoadManifestFile(Fixture("loadbalancer.yaml"));
  EXPECT_TRUE(Validate(set, Environment::kOnPremise).Has("LoadBalancerOnPremise"));
  EXPECT_TRUE(Validate(set, Environment::kCloud).ok());
}

TEST(ManifestValidateTest, DanglingConfigMapReference) {
  const ManifestSet set = LoadManifestFile(Fixture("deployment_configmapref.yaml"));
  EXPECT_TRUE(Validate(set, Environment::kOnPremise).Has("UndefinedConfigMap"));
  ManifestSet with_map = set;
  with_map.Merge(LoadManifestFile(Fixture("configmap_db_info.yaml")));
  EXPECT_TRUE(Validate(with_map, Environment::kOnPremise).ok());
}

TEST(ManifestValidateTest, VirtualServiceChecks) {
  // Subsets without a destination rule are unresolved.
  const ManifestSet weights = LoadManifestFile(Fixture("virtualservice_weights.yaml"));
  EXPECT_TRUE(Validate(weights, Environment::kOnPremise).Has("UnknownSubset"));

  ManifestSet ok = LoadManifestFile(std::string(MESHSIM_TESTDATA) + "/canary/match.yaml");
  EXPECT_TRUE(Validate(ok, Environment::kOnPremise).ok())
      << Validate(ok, Environment::kOnPremise).Render();

  ManifestSet bad_weight = ok;
  bad_weight.virtual_services[0].http[1].route[0].weight = 80;
  EXPECT_TRUE(Validate(bad_weight, Environment::kOnPremise).Has("WeightSum"));

  ManifestSet bad_regex = ok;
  bad_regex.virtual_services[0].http[0].match[0].headers[0].pattern = "(";
  EXPECT_TRUE(Validate(bad_regex, Environment::kOnPremise).Has("InvalidRegex"));

  ManifestSet no_pods = ok;
  no_pods.deployments.pop_back();  // helloworld-v3
  EXPECT_TRUE(Validate(no_pods, Environment::kOnPremise).Has("NoMatchingPods"));

  ManifestSet dup_subset = ok;
  dup_subset.destination_rules[0].subsets.push_back(dup_subset.destination_rules[0].subsets[0]);
  EXPECT_TRUE(Validate(dup_subset, Environment::kOnPremise).Has("DuplicateSubset"));
}

TEST(ManifestValidateTest, AutoscalerAndVolumeChecks) {
  ManifestSet set = LoadManifestFile(Fixture("deployment_userapp.yaml"));
  set.autoscalers.push_back({"", "a", "missing", 1, 2, 100});
  set.autoscalers.push_back({"", "b", "userapp-deployment", 5, 2, 100});
  set.volumes.push_back({"v1", "PersistentVolume", "pv"});
  const ValidationReport report = Validate(set, Environment::kOnPremise);
  EXPECT_TRUE(report.Has("UnknownDeployment"));
  EXPECT_TRUE(report.Has("AutoscalerBounds"));
  EXPECT_TRUE(report.Has("StatefulInStateless"));
  EXPECT_EQ(report.error_count(), 2u);
}

}  // namespace
}  // namespace meshsim
