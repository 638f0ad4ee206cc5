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

#include "meshsim/pipeline.h"

#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "meshsim/cluster.h"
#include "meshsim/error.h"
#include "meshsim/manifest.h"

namespace meshsim {
namespace {

ConfigMapSpec Map(std::string name, std::map<std::string, std::string> entries) {
  return {"v1", std::move(name), std::move(entries)};
}

ErrorCode DerefCode(std::string_view value, const std::vector<ConfigMapSpec>& maps) {
  try {
    Dereference(value, maps);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

const std::string& EnvValue(const PodTemplate& t, std::string_view name) {
  for (const auto& e : t.env) {
    if (e.name == name) return e.value;
  }
  static const std::string kMissing = "<missing>";
  return kMissing;
}

TEST(PipelineTest, DereferenceExamples) {
  const std::vector<ConfigMapSpec> maps = {
      Map("db_info", {{"database", "jdcb://db.cca.com:3306"}, {"name", "db"}}),
      Map("cache", {{"name", "redis"}, {"ttl", "30"}})};
  EXPECT_EQ(Dereference("${db_info.database}", maps), "jdcb://db.cca.com:3306");
  EXPECT_EQ(Dereference("${ttl}", maps), "30");
  EXPECT_EQ(Dereference("url=${db_info.name}/${cache.name}", maps), "url=db/redis");
  EXPECT_EQ(Dereference("plain", maps), "plain");
  EXPECT_EQ(DerefCode("${name}", maps), ErrorCode::kAmbiguousKey);
  EXPECT_EQ(DerefCode("${nothing}", maps), ErrorCode::kUnknownKey);
  EXPECT_EQ(DerefCode("${db_info.nothing}", maps), ErrorCode::kUnknownKey);
  EXPECT_EQ(DerefCode("${nomap.x}", maps), ErrorCode::kUnknownMap);
}

TEST(PipelineTest, ResolveTemplateFormsOfReference) {
  const std::vector<ConfigMapSpec> maps = {Map("db", {{"user", "u"}, {"pass", "p"}})};
  PodTemplate t;
  t.env.push_back({"KEYED", "", "db", "pass"});
  t.env.push_back({"WHOLE", "", "db", ""});
  t.env.push_back({"LITERAL", "${db.user}@host", "", ""});
  t.env_from.push_back("db");
  const PodTemplate r = ResolveTemplate(t, maps);
  EXPECT_EQ(EnvValue(r, "KEYED"), "p");
  EXPECT_EQ(EnvValue(r, "WHOLE"), "pass=p;user=u");
  EXPECT_EQ(EnvValue(r, "LITERAL"), "u@host");
  EXPECT_EQ(EnvValue(r, "user"), "u");
  EXPECT_EQ(EnvValue(r, "pass"), "p");
  PodTemplate missing;
  missing.env_from.push_back("other");
  EXPECT_THROW(ResolveTemplate(missing, maps), Error);
}

class QueueTest : public ::testing::Test {
 protected:
  QueueTest()
      : cluster_(engine_),
        set_(LoadManifestFile(std::string(MESHSIM_TESTDATA) + "/pipeline/account.yaml")),
        queue_(engine_, cluster_, set_) {
    queue_.ApplyInitial();
    engine_.Run();
    engine_.SetPostEventHook([this] {
      for (const auto& d : set_.deployments) {
        min_running_[d.name] = std::min(min_running_.contains(d.name) ? min_running_[d.name] : 1 << 30,
                                        cluster_.RunningCount(d.name));
      }
    });
  }

  ConfigMapSpec Live() const { return *queue_.live().FindConfigMap("db_info"); }

  Engine engine_;
  Cluster cluster_;
  ManifestSet set_;
  RolloutQueue queue_;
  std::map<std::string, int> min_running_;
};

TEST_F(QueueTest, InitialTemplatesAreResolved) {
  EXPECT_EQ(EnvValue(queue_.ResolvedTemplate("account"), "DB_PASSWORD"), "-jyc9ep2");
  EXPECT_EQ(EnvValue(queue_.ResolvedTemplate("account"), "DB_URL"), "jdcb://db.cca.com:3306");
  EXPECT_EQ(cluster_.RunningCount("account"), 3);
  EXPECT_EQ(cluster_.RunningCount("friends"), 2);
  EXPECT_THROW(queue_.ResolvedTemplate("nobody"), Error);
}

TEST_F(QueueTest, SameTickChangesRollOutOneAfterAnother) {
  ConfigMapSpec a = Live();
  a.entries["password"] = "s3cret-a";
  ConfigMapSpec b = a;
  b.entries["name"] = "db-b";
  engine_.Schedule(100, EventKind::kDirective, [&] {
    queue_.EnqueueChange(a, "alice");
    queue_.EnqueueChange(b, "bob");
    EXPECT_TRUE(queue_.active());
    EXPECT_EQ(queue_.pending().size(), 1u);
  });
  engine_.Run();
  ASSERT_EQ(queue_.history().size(), 2u);
  const auto& h = queue_.history();
  EXPECT_EQ(h[0].revision, 1);
  EXPECT_EQ(h[0].author, "alice");
  EXPECT_EQ(h[1].revision, 2);
  EXPECT_EQ(h[1].received_at, 100);
  EXPECT_LT(h[0].applied_at, h[1].applied_at);

  // Revision 2 starts only after revision 1 is applied.
  std::vector<std::string> pipeline;
  for (const auto& e : engine_.trace().EntriesFrom(kPipelineSource)) pipeline.push_back(e.message);
  const auto pos = [&](std::string_view prefix) {
    return std::find_if(pipeline.begin(), pipeline.end(),
                        [&](const std::string& m) { return m.starts_with(prefix); }) -
           pipeline.begin();
  };
  EXPECT_LT(pos("revision 1 applied"), pos("revision 2 started"));

  EXPECT_EQ(Live().entries.at("password"), "s3cret-a");
  EXPECT_EQ(Live().entries.at("name"), "db-b");
  EXPECT_EQ(EnvValue(queue_.ResolvedTemplate("account"), "DB_PASSWORD"), "s3cret-a");
  EXPECT_GE(min_running_["account"], 3);
  EXPECT_GE(min_running_["friends"], 2);
  EXPECT_EQ(queue_.RenderHistoryCsv().substr(0, 48),
            "revision,tick_received,tick_applied,author,map\n1");
}

TEST_F(QueueTest, RollbackRestoresTemplateByteExactly) {
  ConfigMapSpec a = Live();
  a.entries["password"] = "first";
  queue_.EnqueueChange(a, "alice");
  engine_.Run();
  const std::string after_one = CanonicalTemplate(queue_.ResolvedTemplate("account"));
  ConfigMapSpec b = Live();
  b.entries["password"] = "second";
  queue_.EnqueueChange(b, "bob");
  engine_.Run();
  EXPECT_NE(CanonicalTemplate(queue_.ResolvedTemplate("account")), after_one);
  const ConfigRevision& rb = queue_.Rollback(1);
  EXPECT_EQ(rb.rollback_of, 1);
  engine_.Run();
  EXPECT_EQ(CanonicalTemplate(queue_.ResolvedTemplate("account")), after_one);
  // Idempotent: a second rollback to the same revision changes nothing.
  queue_.Rollback(1);
  engine_.Run();
  EXPECT_EQ(CanonicalTemplate(queue_.ResolvedTemplate("account")), after_one);
  EXPECT_EQ(queue_.history().size(), 4u);
  EXPECT_GE(min_running_["account"], 3);
  try {
    queue_.Rollback(99);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownRevision);
  }
}

TEST_F(QueueTest, ConfigChangeRestartsOnlyAffectedDeployments) {
  const std::string friends_rs = cluster_.deployment("friends").new_replica_set;
  ConfigMapSpec a = Live();
  a.entries["password"] = "x";
  queue_.EnqueueChange(a, "alice");
  engine_.Run();
  EXPECT_EQ(cluster_.deployment("friends").new_replica_set, friends_rs);
  EXPECT_EQ(cluster_.deployment("account").spec.pod_template.annotations.at(
                std::string(kRevisionAnnotation)),
            "1");
}

TEST_F(QueueTest, InvalidChangesAreRejected) {
  ConfigMapSpec no_password = Live();
  no_password.entries.erase("password");
  try {
    queue_.EnqueueChange(no_password, "mallory");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailed);
  }
  try {
    queue_.EnqueueChange(Live(), "mallory", {"ghost"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailed);
  }
  EXPECT_EQ(queue_.accepted(), 0u);
}

TEST_F(QueueTest, ImageUpdateWaitsForRunningRollover) {
  ConfigMapSpec a = Live();
  a.entries["password"] = "x";
  queue_.EnqueueChange(a, "alice");
  queue_.UpdateImage("account", "account:2");
  engine_.Run();
  EXPECT_EQ(cluster_.deployment("account").spec.pod_template.image, "account:2");
  EXPECT_EQ(EnvValue(cluster_.deployment("account").spec.pod_template, "DB_PASSWORD"), "x");
  EXPECT_GE(min_running_["account"], 3);
}

}  // namespace
}  // namespace meshsim
