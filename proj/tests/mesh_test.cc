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

#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "meshsim/budget.h"
#include "meshsim/error.h"
#include "meshsim/manifest.h"

namespace meshsim {
namespace {

std::string Data(const std::string& rel) { return std::string(MESHSIM_TESTDATA) + "/" + rel; }

Request To(std::string host, std::map<std::string, std::string> headers = {}) {
  Request r;
  r.target_host = std::move(host);
  r.headers = std::move(headers);
  return r;
}

// Reference smooth weighted round robin: add each weight to its running
// value, pick the first maximum, subtract the total from the winner.
std::vector<std::size_t> OracleSwrr(std::vector<int> weights, int count) {
  const int g = std::accumulate(weights.begin(), weights.end(), 0,
                                [](int a, int b) { return std::gcd(a, b); });
  for (int& w : weights) w /= g;
  const int total = std::accumulate(weights.begin(), weights.end(), 0);
  std::vector<int> current(weights.size(), 0);
  std::vector<std::size_t> out;
  for (int k = 0; k < count; ++k) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      current[i] += weights[i];
      if (current[i] > current[best]) best = i;
    }
    current[best] -= total;
    out.push_back(best);
  }
  return out;
}

std::size_t DestinationIndex(const Selection& sel) {
  return static_cast<std::size_t>(sel.destination - sel.route->destinations.data());
}

TEST(MeshTest, WeightedRoutingFollowsSmoothWrr) {
  const RoutingTable table =
      RoutingTable::Build(LoadManifestFile(Data("manifests/virtualservice_weights.yaml")));
  Router router(table);
  std::vector<std::string> first;
  for (int i = 0; i < 4; ++i) first.push_back(router.SelectDestination(To("reviews")).destination->subset);
  EXPECT_EQ(first, (std::vector<std::string>{"v1", "v1", "v2", "v1"}));
}

// Property: for random weight vectors, the router reproduces the oracle
// sequence and every aligned window of sum(weights)/gcd requests carries
// the exact ratio.
TEST(MeshTest, WeightedExactnessOverRandomWeights) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 4)(rng);
    std::vector<int> weights(static_cast<std::size_t>(n));
    for (int& w : weights) w = std::uniform_int_distribution<int>(1, 10)(rng) * 5;
    ManifestSet set;
    VirtualServiceSpec vs;
    vs.name = "svc";
    vs.hosts = {"svc"};
    HttpRoute route;
    for (int i = 0; i < n; ++i) {
      route.route.push_back({"svc", "v" + std::to_string(i), weights[i], std::nullopt});
    }
    vs.http.push_back(route);
    set.virtual_services.push_back(vs);
    const RoutingTable table = RoutingTable::Build(set);
    Router router(table);
    const int g = std::accumulate(weights.begin(), weights.end(), 0,
                                  [](int a, int b) { return std::gcd(a, b); });
    const int window = std::accumulate(weights.begin(), weights.end(), 0) / g;
    const auto expected = OracleSwrr(weights, window * 20);
    std::vector<int> counts(weights.size(), 0);
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const std::size_t got = DestinationIndex(router.SelectDestination(To("svc")));
      ASSERT_EQ(got, expected[k]) << "trial " << trial << " request " << k;
      ++counts[got];
      if ((k + 1) % static_cast<std::size_t>(window) == 0) {
        for (std::size_t i = 0; i < weights.size(); ++i) {
          EXPECT_EQ(counts[i], weights[i] / g);
        }
        std::fill(counts.begin(), counts.end(), 0);
      }
    }
  }
}

TEST(MeshTest, PlainRoundRobinAcrossPods) {
  ManifestSet set;
  DeploymentSpec d;
  d.name = "svc";
  set.deployments.push_back(d);
  const RoutingTable table = RoutingTable::Build(set);
  StaticPodSource pods;
  pods.Add("svc", "v1", {"p1", "svc"});
  pods.Add("svc", "v1", {"p2", "svc"});
  Router router(table);
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(router.Select(To("svc"), pods).pod->id);
  EXPECT_EQ(ids, (std::vector<std::string>{"p1", "p2", "p1", "p2"}));
}

// Cookies built to contain an `email=...@company.com` segment, or built
// so that no segment can satisfy the rule.
std::pair<std::string, bool> RandomCookie(std::mt19937_64& rng) {
  auto pick = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
  static const std::vector<std::string> kOther = {"session=42", "theme=dark", "lang=en",
                                                  "uid=a.b", "x=@company.com"};
  static const std::vector<std::string> kNearMiss = {
      "email=ann@company.org", "email=bob@example.com", "mail=eve@company.com",
      "xemail=joe@company.com", "email=ann@company.com.au", "Email=ann@company.com"};
  std::vector<std::string> parts;
  for (int i = pick(3); i > 0; --i) parts.push_back(kOther[static_cast<std::size_t>(pick(4))]);
  const bool match = pick(1) == 1;
  const std::string user = std::string("user") + std::to_string(pick(99));
  const std::string segment = match ? "email=" + user + "@company.com"
                                    : kNearMiss[static_cast<std::size_t>(pick(5))];
  parts.insert(parts.begin() + pick(static_cast<int>(parts.size())), segment);
  std::string cookie;
  for (std::size_t i = 0; i < parts.size(); ++i) cookie += (i ? ";" : "") + parts[i];
  return {cookie, match};
}

TEST(MeshTest, MatchRouteTakesPrecedenceOverWeights) {
  const RoutingTable table = RoutingTable::Build(LoadManifestFile(Data("canary/match.yaml")));
  Router router(table);
  std::mt19937_64 rng(5);
  int matched = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto [cookie, should_match] = RandomCookie(rng);
    const Selection sel = router.SelectDestination(To("helloworld", {{"cookie", cookie}}));
    if (should_match) {
      ++matched;
      EXPECT_TRUE(sel.matched) << cookie;
      EXPECT_EQ(sel.destination->subset, "v3") << cookie;
    } else {
      EXPECT_FALSE(sel.matched) << cookie;
      EXPECT_NE(sel.destination->subset, "v3") << cookie;
    }
  }
  EXPECT_GT(matched, 500);
  const Selection none = router.SelectDestination(To("helloworld"));
  EXPECT_FALSE(none.matched);
}

TEST(MeshTest, BadRegexFailsToBuild) {
  ManifestSet set = LoadManifestFile(Data("canary/match.yaml"));
  set.virtual_services[0].http[0].match[0].headers[0].pattern = "([";
  try {
    RoutingTable::Build(set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailed);
  }
}

TEST(MeshTest, AdmissionMatrixIsTotal) {
  const std::map<std::pair<RequestClass, Entrypoint>, Admission> expected = {
      {{RequestClass::kData, Entrypoint::kGateway}, {true, ""}},
      {{RequestClass::kAction, Entrypoint::kGateway}, {true, ""}},
      {{RequestClass::kData, Entrypoint::kInternal}, {true, ""}},
      {{RequestClass::kAction, Entrypoint::kInternal}, {true, ""}},
      {{RequestClass::kData, Entrypoint::kServiceEntry}, {true, ""}},
      {{RequestClass::kAction, Entrypoint::kServiceEntry}, {false, "ActionViaServiceEntry"}},
      {{RequestClass::kData, Entrypoint::kNodePort}, {false, "NodePortBanned"}},
      {{RequestClass::kAction, Entrypoint::kNodePort}, {false, "NodePortBanned"}},
  };
  for (const auto& [key, verdict] : expected) {
    Request r;
    r.klass = key.first;
    r.entrypoint = key.second;
    EXPECT_EQ(Admit(r), verdict) << RequestClassName(key.first) << "/"
                                 << EntrypointName(key.second);
  }
}

TEST(MeshTest, NameParsersRoundTrip) {
  for (auto k : {RequestClass::kData, RequestClass::kAction}) {
    EXPECT_EQ(ParseRequestClass(RequestClassName(k)), k);
  }
  for (auto e : {Entrypoint::kGateway, Entrypoint::kServiceEntry, Entrypoint::kInternal,
                 Entrypoint::kNodePort}) {
    EXPECT_EQ(ParseEntrypoint(EntrypointName(e)), e);
  }
  EXPECT_THROW(ParseEntrypoint("Sideways"), Error);
}

struct RetryFixture {
  RetryFixture(std::vector<Tick> service_times, RetryPolicy retry) {
    DeploymentSpec d;
    d.name = "svc";
    set.deployments.push_back(d);
    table = RoutingTable::Build(set);
    for (std::size_t i = 0; i < service_times.size(); ++i) {
      const std::string id = "p" + std::to_string(i + 1);
      pods.Add("svc", "v1", {id, "svc"});
      profile.SetForPod(id, service_times[i]);
    }
    options.default_retry = retry;
  }

  RequestOutcome Run(Entrypoint entrypoint = Entrypoint::kInternal) {
    Engine engine;
    Mesh mesh(engine, table, pods, profile, options);
    Request r = To("svc");
    r.entrypoint = entrypoint;
    mesh.Submit(r);
    engine.Run();
    EXPECT_EQ(mesh.in_flight(), 0u);
    return mesh.outcomes().at(0);
  }

  ManifestSet set;
  RoutingTable table;
  StaticPodSource pods;
  ServiceTimeProfile profile;
  MeshOptions options;
};

TEST(MeshTest, RetryExamples) {
  const RequestOutcome fast = RetryFixture({100}, {3, 667}).Run();
  EXPECT_EQ(fast.status, OutcomeStatus::kSuccess);
  EXPECT_EQ(fast.attempts, 1);
  EXPECT_EQ(fast.latency, 100);

  const RequestOutcome slow = RetryFixture({1000, 1000}, {3, 667}).Run();
  EXPECT_EQ(slow.status, OutcomeStatus::kTimedOut);
  EXPECT_EQ(slow.attempts, 3);
  EXPECT_EQ(slow.latency, 3 * 667);
  EXPECT_EQ(slow.path, (std::vector<std::string>{"p1", "p2", "p1"}));

  const RequestOutcome second = RetryFixture({1000, 100}, {3, 667}).Run();
  EXPECT_EQ(second.status, OutcomeStatus::kSuccess);
  EXPECT_EQ(second.attempts, 2);
  EXPECT_EQ(second.latency, 667 + 100);

  const RequestOutcome via_gateway = RetryFixture({100}, {3, 667}).Run(Entrypoint::kGateway);
  EXPECT_EQ(via_gateway.latency, 1 + 100);
}

TEST(MeshTest, NoLivePodConsumesAttempts) {
  const RequestOutcome out = RetryFixture({}, {3, 667}).Run();
  EXPECT_EQ(out.status, OutcomeStatus::kUnavailable);
  EXPECT_EQ(out.reason, "NoLivePod");
  EXPECT_EQ(out.attempts, 3);
  EXPECT_EQ(out.latency, 0);
}

TEST(MeshTest, RejectionsAndExternalHosts) {
  ManifestSet set;
  ServiceEntrySpec se;
  se.name = "legacy-db";
  se.external_host = "db.example.com";
  set.service_entries.push_back(se);
  const RoutingTable table = RoutingTable::Build(set);
  StaticPodSource pods;
  Engine engine;
  Mesh mesh(engine, table, pods);
  Request data = To("db.example.com");
  data.entrypoint = Entrypoint::kServiceEntry;
  mesh.Submit(data);
  Request action = data;
  action.id = 0;
  action.klass = RequestClass::kAction;
  mesh.Submit(action);
  mesh.Submit(To("nowhere"));
  engine.Run();
  ASSERT_EQ(mesh.outcomes().size(), 3u);
  std::map<std::uint64_t, RequestOutcome> by_id;
  for (const auto& o : mesh.outcomes()) by_id[o.id] = o;
  EXPECT_EQ(by_id[1].status, OutcomeStatus::kSuccess);
  EXPECT_EQ(by_id[1].latency, 1);
  EXPECT_EQ(by_id[2].status, OutcomeStatus::kRejected);
  EXPECT_EQ(by_id[2].reason, "ActionViaServiceEntry");
  EXPECT_EQ(by_id[3].reason, "UnknownHost");
}

// Property: attempts never exceed the policy and latency stays within
// attempts x timeout plus the final service time.
TEST(MeshTest, RetryBoundHoldsForRandomProfiles) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n_pods = std::uniform_int_distribution<int>(0, 4)(rng);
    std::vector<Tick> times;
    for (int i = 0; i < n_pods; ++i) times.push_back(std::uniform_int_distribution<Tick>(1, 1500)(rng));
    const RetryPolicy retry{std::uniform_int_distribution<int>(1, 4)(rng),
                            std::uniform_int_distribution<Tick>(50, 900)(rng)};
    const RequestOutcome out = RetryFixture(times, retry).Run();
    EXPECT_LE(out.attempts, retry.attempts);
    EXPECT_GE(out.attempts, 1);
    EXPECT_LE(out.latency, out.attempts * retry.per_try_timeout);
    if (out.status == OutcomeStatus::kTimedOut) {
      EXPECT_EQ(out.latency, retry.attempts * retry.per_try_timeout);
    }
  }
}

// Property: a budget-derived retry policy keeps the end-to-end time within
// the user timeout whenever the user-to-gateway delay respects the strict
// bound, i.e. is at most max_user_to_gateway - 1.
TEST(MeshTest, BudgetDerivedPolicyRespectsUserTimeout) {
  for (int layers = 1; layers <= 6; ++layers) {
    const BudgetResult budget = SolveBudget({.layers = layers});
    const RetryPolicy retry = MakeRetryPolicy(budget);
    const RequestOutcome out = RetryFixture({100000, 100000}, retry).Run(Entrypoint::kGateway);
    EXPECT_EQ(out.status, OutcomeStatus::kTimedOut);
    EXPECT_LE(budget.max_user_to_gateway - 1 + out.latency, budget.inputs.user_timeout)
        << "layers " << layers;
  }
}

TEST(MeshTest, RequestsCsvRoundTrip) {
  const std::vector<Request> reqs = ParseRequestsCsv(
      "tick,host,klass,entrypoint,header_cookie\n"
      "100,helloworld,Data,Gateway,email=a@company.com\n"
      "\n"
      "105,helloworld,Action,ServiceEntry,\n");
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_EQ(reqs[0].id, 1u);
  EXPECT_EQ(reqs[0].issued_at, 100);
  EXPECT_EQ(reqs[0].headers.at("cookie"), "email=a@company.com");
  EXPECT_EQ(reqs[1].klass, RequestClass::kAction);
  EXPECT_EQ(reqs[1].entrypoint, Entrypoint::kServiceEntry);
  EXPECT_TRUE(reqs[1].headers.empty());
  EXPECT_THROW(ParseRequestsCsv("1,host\n"), Error);

  RequestOutcome o;
  o.id = 7;
  o.status = OutcomeStatus::kTimedOut;
  o.attempts = 3;
  o.latency = 2001;
  o.path = {"a", "b"};
  EXPECT_EQ(RenderOutcomesCsv({o}), "id,status,attempts,latency,path\n7,TimedOut,3,2001,a;b\n");
}

TEST(MeshTest, WindowLoadCountsRoutedTries) {
  RetryFixture fx({1000, 1000}, {3, 667});
  Engine engine;
  Mesh mesh(engine, fx.table, fx.pods, fx.profile, fx.options);
  mesh.Submit(To("svc"));
  engine.Run();
  EXPECT_EQ(mesh.TakeWindowLoad("svc"), 3);
  EXPECT_EQ(mesh.TakeWindowLoad("svc"), 0);
  EXPECT_EQ(mesh.TakeWindowLoad("other"), 0);
}

}  // namespace
}  // namespace meshsim
