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
#include <map>

#include <fmt/format.h>

#include "meshsim/budget.h"
#include "meshsim/decomposer.h"
#include "meshsim/models.h"
#include "meshsim/scenario.h"
#include "text.h"

namespace meshsim::cli {

namespace {

void PrintFindings(const ValidationReport& report, std::ostream& err) {
  for (const auto& f : report.findings) err << f.Render() << "\n";
}

std::string OutDir(const GlobalOptions& global, std::string_view fallback) {
  return global.out_dir.empty() ? std::string(fallback) : global.out_dir;
}

std::string Row(std::string_view name, std::string_view value) {
  return fmt::format("{:<19} {}\n", name, value);
}

}  // namespace

int ReportError(const Error& error, std::ostream& err) {
  err << "ERROR " << ErrorCodeName(error.code()) << ": " << error.message() << "\n";
  return error.code() == ErrorCode::kLivelock ? kExitLivelock : kExitInvalid;
}

int Simulate(const std::string& path, const GlobalOptions& global, std::ostream& out,
             std::ostream& err) {
  try {
    const Scenario scenario = LoadScenario(path);
    RunOptions options;
    options.seed = global.seed;
    options.max_ticks = global.max_ticks;
    const SimulationResult result = RunScenario(scenario, options);
    PrintFindings(result.validation, err);
    if (!result.ran) return kExitInvalid;
    const std::string dir = OutDir(global, "out");
    WriteArtifacts(result, dir);
    out << Row("end tick", std::to_string(result.end_tick));
    for (const auto& [name, running] : result.running) {
      out << Row("running " + name, std::to_string(running));
    }
    std::map<std::string, int> statuses;
    for (const auto& o : result.outcomes) ++statuses[std::string(OutcomeStatusName(o.status))];
    for (const auto& [status, count] : statuses) {
      out << Row("requests " + status, std::to_string(count));
    }
    for (const auto& r : result.rejected) err << "WARN rejected: " << r << "\n";
    out << Row("artifacts", dir);
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int ValidateManifests(const std::vector<std::string>& files, Environment environment,
                      std::ostream& out, std::ostream& err) {
  try {
    ManifestSet set;
    for (const auto& f : files) set.Merge(LoadManifestFile(f));
    const ValidationReport report = Validate(set, environment);
    PrintFindings(report, err);
    out << fmt::format("{} error(s), {} warning(s)\n", report.error_count(),
                       report.findings.size() - report.error_count());
    return report.ok() ? kExitOk : kExitInvalid;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int Budget(const BudgetArgs& args, std::ostream& out, std::ostream& err) {
  try {
    BudgetInputs in;
    in.user_timeout = args.user_timeout;
    in.gateway_budget = args.gateway_budget;
    in.safety_factor = args.safety_factor;
    if (!args.topology.empty()) {
      const Topology t = ParseTopologyCsv(text::ReadFile(args.topology));
      const std::string root = args.root.empty() ? t.Root() : args.root;
      in.layers = CountLayers(t, root);
      out << fmt::format("layers from {} = {}\n", root, in.layers);
    } else if (args.layers) {
      in.layers = *args.layers;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "pass --layers or --topology");
    }
    const BudgetResult result = SolveBudget(in);
    out << RenderBudget(result, MakeRetryPolicy(result, args.attempts));
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int Cost(const CostArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.sweep) {
      if (args.max_n < 1 || args.max_l < 1) {
        throw Error(ErrorCode::kInvalidArgument, "sweep bounds must be >= 1");
      }
      out << RenderCostSweepCsv(args.max_n, args.max_l);
      return kExitOk;
    }
    const std::int64_t naive = CallCost({args.n, args.l, CallStrategy::kNaive});
    const std::int64_t batched = CallCost({args.n, args.l, CallStrategy::kBatched});
    out << Row("N", std::to_string(args.n));
    out << Row("L", std::to_string(args.l));
    out << Row("naive", std::to_string(naive));
    out << Row("batched", std::to_string(batched));
    out << Row("bound", std::to_string(RuntimeBound(args.n, args.l)));
    out << Row("cheaper", batched < naive ? "batched" : (batched == naive ? "equal" : "naive"));
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int Memory(const MemoryArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const MemoryPrediction p = PredictMemory({args.heap, args.threads, args.stack, args.classes});
    out << Row("heap", text::FormatNumber(args.heap));
    out << Row("threads", std::to_string(args.threads));
    out << Row("stack", text::FormatNumber(args.stack));
    out << Row("classes", std::to_string(args.classes));
    out << Row("non-heap", fmt::format("{:.3f}", p.non_heap));
    out << Row("total", fmt::format("{:.3f}", p.total));
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int Sizing(const SizingArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SizingCase c{args.original, args.parts, args.claimed_total};
    if (!c.claimed_total) c.claimed_total = ReferenceStatedTotal(c.original, c.parts);
    const SizingVerdict v = CheckSizing(c);
    out << RenderSizing(c, v);
    return v.pass ? kExitOk : kExitViolations;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int Decompose(const std::string& units, const std::string& edges, const GlobalOptions& global,
              std::ostream& out, std::ostream& err) {
  ServiceGraph graph;
  try {
    graph = ParseServiceGraph(text::ReadFile(units), text::ReadFile(edges));
  } catch (const Error& e) {
    return ReportError(e, err);
  }
  try {
    const ServicePlan plan = ProposeServices(graph);
    const std::vector<Violation> violations = FindViolations(graph, plan);
    const std::filesystem::path dir(OutDir(global, "."));
    std::filesystem::create_directories(dir);
    text::WriteFile((dir / "plan.yaml").string(), SerializeManifest(PlanManifests(plan)));
    const std::string report = RenderViolations(plan, violations);
    text::WriteFile((dir / "violations.txt").string(), report);
    out << RenderPlanSummary(plan);
    err << report;
    return violations.empty() ? kExitOk : kExitViolations;
  } catch (const Error& e) {
    const int code = ReportError(e, err);
    return e.code() == ErrorCode::kUnassignableUnit ? kExitViolations : code;
  }
}

int Describe(const std::string& path, const std::string& deployment, std::optional<Tick> at,
             const GlobalOptions& global, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = LoadScenario(path);
    RunOptions options;
    options.seed = global.seed;
    options.max_ticks = global.max_ticks;
    options.stop_at = at;
    const SimulationResult result = RunScenario(scenario, options);
    PrintFindings(result.validation, err);
    if (!result.ran) return kExitInvalid;
    const std::string marker = fmt::format("Name:{:<19}{}\n", "", deployment);
    const std::size_t start = result.describe.find(marker);
    if (start == std::string::npos) {
      throw Error(ErrorCode::kNotFound, fmt::format("deployment '{}' not found", deployment));
    }
    const std::size_t end = result.describe.find("\n\n", start);
    out << result.describe.substr(start, end == std::string::npos ? std::string::npos
                                                                   : end - start + 1);
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

}  // namespace meshsim::cli
