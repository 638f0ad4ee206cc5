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

#include "meshsim/commands.h"

#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace meshsim::cli {
namespace {

std::string Data(const std::string& rel) { return std::string(MESHSIM_TESTDATA) + "/" + rel; }

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("meshsim_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    global_.out_dir = dir_.string();
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  bool Has(const std::string& needle) const { return out_.str().find(needle) != std::string::npos; }

  std::filesystem::path dir_;
  GlobalOptions global_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CommandsTest, BudgetThreeLayers) {
  EXPECT_EQ(Budget({.layers = 3}, out_, err_), kExitOk);
  EXPECT_TRUE(Has("perTryTimeout: 667ms"));
  EXPECT_TRUE(Has("maxUserToGateway < 4000ms"));
}

TEST_F(CommandsTest, BudgetFromTopology) {
  EXPECT_EQ(Budget({.topology = Data("userapp/topology.csv")}, out_, err_), kExitOk);
  EXPECT_TRUE(Has("L = 3"));
  EXPECT_TRUE(Has("attempts: 3"));
}

TEST_F(CommandsTest, BudgetInfeasible) {
  EXPECT_EQ(Budget({.layers = 3, .user_timeout = 5000}, out_, err_), kExitInvalid);
  EXPECT_EQ(err_.str().substr(0, 23), "ERROR InfeasibleBudget:");
}

TEST_F(CommandsTest, BudgetNeedsLayersOrTopology) {
  EXPECT_EQ(Budget({}, out_, err_), kExitInvalid);
}

TEST_F(CommandsTest, CostModels) {
  EXPECT_EQ(Cost({.n = 5, .l = 3}, out_, err_), kExitOk);
  EXPECT_TRUE(Has("naive               30"));
  EXPECT_TRUE(Has("batched             13"));
  std::ostringstream sweep;
  EXPECT_EQ(Cost({.sweep = true, .max_n = 2, .max_l = 2}, sweep, err_), kExitOk);
  EXPECT_EQ(sweep.str(), "N,L,naive,batched,bound\n1,1,2,3,4\n1,2,4,4,6\n2,1,4,5,6\n2,2,8,6,8\n");
  EXPECT_EQ(Cost({.n = 0, .l = 3}, out_, err_), kExitInvalid);
}

TEST_F(CommandsTest, MemoryModel) {
  EXPECT_EQ(Memory({.heap = 22, .threads = 25, .classes = 6200}, out_, err_), kExitOk);
  EXPECT_TRUE(Has("non-heap            49.800"));
  EXPECT_EQ(Memory({.heap = -1, .threads = 1, .classes = 1}, out_, err_), kExitInvalid);
}

TEST_F(CommandsTest, SizingVerdicts) {
  EXPECT_EQ(Sizing({.original = 800, .parts = {400, 400, 400, 400, 600}}, out_, err_), kExitOk);
  EXPECT_TRUE(Has("sum             2200"));
  EXPECT_TRUE(Has("3200"));
  std::ostringstream bad;
  EXPECT_EQ(Sizing({.original = 800, .parts = {900}}, bad, err_), kExitViolations);
  EXPECT_EQ(Sizing({.original = 800, .parts = {}}, bad, err_), kExitInvalid);
}

TEST_F(CommandsTest, DecomposeWritesPlan) {
  EXPECT_EQ(Decompose(Data("userapp/units.csv"), Data("userapp/edges.csv"), global_, out_, err_),
            kExitOk);
  EXPECT_TRUE(Has("bff         userapp"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "plan.yaml"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "violations.txt"));
}

TEST_F(CommandsTest, DecomposeViolationsAndErrors) {
  EXPECT_EQ(Decompose(Data("userapp/units.csv"), Data("userapp/edges_same_hierarchy.csv"), global_,
                      out_, err_),
            kExitViolations);
  EXPECT_EQ(err_.str().substr(0, 24), "ERROR SameHierarchyCall:");
  EXPECT_EQ(Decompose(Data("userapp/units_empty.csv"), Data("userapp/edges.csv"), global_, out_,
                      err_),
            kExitInvalid);
  EXPECT_EQ(Decompose(Data("userapp/missing.csv"), Data("userapp/edges.csv"), global_, out_, err_),
            kExitInvalid);
}

TEST_F(CommandsTest, SimulateExitCodes) {
  EXPECT_EQ(Simulate(Data("rollover/update.scenario"), global_, out_, err_), kExitOk);
  EXPECT_TRUE(Has("end tick            1057"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "trace.txt"));
  EXPECT_EQ(Simulate(Data("scenarios/nodeport.scenario"), global_, out_, err_), kExitInvalid);
  EXPECT_NE(err_.str().find("ERROR NodePortBanned"), std::string::npos);
  EXPECT_EQ(Simulate(Data("scenarios/bad_order.scenario"), global_, out_, err_), kExitInvalid);
  EXPECT_EQ(Simulate(Data("scenarios/none.scenario"), global_, out_, err_), kExitInvalid);
  GlobalOptions tight = global_;
  tight.max_ticks = 5000;
  std::ostringstream err;
  EXPECT_EQ(Simulate(Data("scenarios/livelock.scenario"), tight, out_, err), kExitLivelock);
  EXPECT_EQ(err.str().substr(0, 15), "ERROR Livelock:");
}

TEST_F(CommandsTest, ValidateManifests) {
  EXPECT_EQ(ValidateManifests({Data("manifests/loadbalancer.yaml")}, Environment::kCloud, out_, err_),
            kExitOk);
  EXPECT_EQ(
      ValidateManifests({Data("manifests/loadbalancer.yaml")}, Environment::kOnPremise, out_, err_),
      kExitInvalid);
  EXPECT_EQ(ValidateManifests({Data("manifests/nope.yaml")}, Environment::kCloud, out_, err_),
            kExitInvalid);
}

TEST_F(CommandsTest, DescribeAtTick) {
  EXPECT_EQ(Describe(Data("rollover/update.scenario"), "nginx-deployment", 1030, global_, out_, err_),
            kExitOk);
  EXPECT_TRUE(Has("3 desired | 2 updated | 4 total | 3 available | 0 unavailable"));
  EXPECT_EQ(Describe(Data("rollover/update.scenario"), "ghost", std::nullopt, global_, out_, err_),
            kExitInvalid);
}

}  // namespace
}  // namespace meshsim::cli
