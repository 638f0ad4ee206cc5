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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meshsim/commands.h"
#include "meshsim/error.h"
#include "meshsim/manifest.h"

namespace {

using meshsim::cli::kExitInvalid;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for a service mesh cluster"};
  app.require_subcommand(1);
  meshsim::cli::GlobalOptions global;
  std::uint64_t seed = 0;
  app.add_option("--out", global.out_dir, "Output directory")->expected(1);
  auto* seed_opt = app.add_option("--seed", seed, "Seed override");
  app.add_option("--max-ticks", global.max_ticks, "Tick budget before Livelock")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string scenario;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("scenario", scenario, "Scenario file")->required();

  std::vector<std::string> manifests;
  std::string environment = "OnPremise";
  auto* validate = app.add_subcommand("validate", "Validate manifest files");
  validate->add_option("manifests", manifests, "Manifest files")->required();
  validate->add_option("--environment", environment, "OnPremise or Cloud");

  meshsim::cli::BudgetArgs budget_args;
  int layers = 0;
  auto* budget = app.add_subcommand("budget", "Solve the timeout budget");
  auto* layers_opt = budget->add_option("--layers", layers, "Layer count L")
                         ->check(CLI::PositiveNumber);
  auto* topology_opt =
      budget->add_option("--topology", budget_args.topology, "from,to call edges (CSV)");
  layers_opt->excludes(topology_opt);
  budget->add_option("--root", budget_args.root, "Platform node of the topology")
      ->needs(topology_opt);
  budget->add_option("--user-timeout", budget_args.user_timeout, "ms");
  budget->add_option("--gateway-budget", budget_args.gateway_budget, "ms");
  budget->add_option("--safety-factor", budget_args.safety_factor);
  int attempts = 0;
  auto* attempts_opt = budget->add_option("--attempts", attempts, "Override retry attempts");

  meshsim::cli::CostArgs cost_args;
  auto* cost = app.add_subcommand("cost", "Aggregated-call cost model");
  cost->add_option("--n", cost_args.n, "Items N");
  cost->add_option("--l", cost_args.l, "Layers L");
  cost->add_flag("--sweep", cost_args.sweep, "Emit the (N,L) grid as CSV");
  cost->add_option("--max-n", cost_args.max_n);
  cost->add_option("--max-l", cost_args.max_l);

  meshsim::cli::MemoryArgs memory_args;
  auto* memory = app.add_subcommand("memory", "Heap plus non-heap memory model");
  memory->add_option("--heap", memory_args.heap, "MiB")->required();
  memory->add_option("--threads", memory_args.threads)->required();
  memory->add_option("--classes", memory_args.classes)->required();
  memory->add_option("--stack", memory_args.stack, "MiB per thread");

  meshsim::cli::SizingArgs sizing_args;
  double claimed = 0;
  auto* sizing = app.add_subcommand("sizing", "Service sizing guideline");
  sizing->add_option("--original", sizing_args.original, "Original size X (MiB)")->required();
  sizing->add_option("--parts", sizing_args.parts, "Part sizes")->required()->delimiter(',');
  auto* claimed_opt = sizing->add_option("--claimed-total", claimed, "Stated total to check");

  std::string units;
  std::string edges;
  auto* decompose = app.add_subcommand("decompose", "Propose services from a monolith graph");
  decompose->add_option("units", units, "units.csv")->required();
  decompose->add_option("edges", edges, "edges.csv")->required();

  std::string deployment;
  meshsim::Tick at = 0;
  auto* describe = app.add_subcommand("describe", "Describe a deployment after a scenario");
  describe->add_option("scenario", scenario, "Scenario file")->required();
  describe->add_option("deployment", deployment, "Deployment name")->required();
  auto* at_opt = describe->add_option("--at", at, "Stop the scenario at this tick");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  if (*seed_opt) global.seed = seed;

  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (*simulate) return meshsim::cli::Simulate(scenario, global, out, err);
  if (*validate) {
    try {
      return meshsim::cli::ValidateManifests(manifests, meshsim::ParseEnvironment(environment),
                                             out, err);
    } catch (const meshsim::Error& e) {
      return meshsim::cli::ReportError(e, err);
    }
  }
  if (*budget) {
    if (*layers_opt) budget_args.layers = layers;
    if (*attempts_opt) budget_args.attempts = attempts;
    return meshsim::cli::Budget(budget_args, out, err);
  }
  if (*cost) return meshsim::cli::Cost(cost_args, out, err);
  if (*memory) return meshsim::cli::Memory(memory_args, out, err);
  if (*sizing) {
    if (*claimed_opt) sizing_args.claimed_total = claimed;
    return meshsim::cli::Sizing(sizing_args, out, err);
  }
  if (*decompose) return meshsim::cli::Decompose(units, edges, global, out, err);
  if (*describe) {
    std::optional<meshsim::Tick> stop;
    if (*at_opt) stop = at;
    return meshsim::cli::Describe(scenario, deployment, stop, global, out, err);
  }
  return kExitInvalid;
}
