/*
 Copyright 2026 The steergame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <CLI11.hpp>

#include <iostream>

#include "steergame/errors.hpp"
#include "steergame/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kSolverFailure = 2;
constexpr int kInfeasible = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean and covariance steering for discrete-time LQ stochastic games"};
  app.require_subcommand(1);

  std::string scenario_path, outdir;
  std::optional<int> samples, max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  bool strict = false;

  for (const char* name : {"solve-unconstrained", "solve-constrained", "simulate", "all"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario YAML file")->required();
    sub->add_option("--outdir", outdir, "directory for CSV, plot and report output")->required();
    sub->add_option("--samples", samples, "Monte Carlo sample count");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--epsilon", epsilon, "Jacobi stopping tolerance");
    sub->add_option("--max-iter", max_iter, "Jacobi iteration limit");
    sub->add_flag("--strict", strict, "exit with status 3 when a problem is infeasible");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  steergame::Scenario sc = [&] {
    try {
      return steergame::parse_scenario(scenario_path);
    } catch (const steergame::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(kInputError);
    }
  }();
  if (samples) {
    if (*samples < 1) {
      std::cerr << "error: --samples must be at least 1\n";
      return kInputError;
    }
    sc.solver.samples = *samples;
  }
  if (seed) sc.solver.seed = *seed;
  if (epsilon) {
    if (!(*epsilon > 0.0)) {
      std::cerr << "error: --epsilon must be positive\n";
      return kInputError;
    }
    sc.solver.epsilon = *epsilon;
  }
  if (max_iter) {
    if (*max_iter < 1) {
      std::cerr << "error: --max-iter must be at least 1\n";
      return kInputError;
    }
    sc.solver.max_iter = *max_iter;
  }

  steergame::RunReport rep;
  try {
    rep = steergame::run(sc, steergame::parse_command(command), outdir);
  } catch (const steergame::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }

  const auto& f = rep.feasibility;
  std::cout << "scenario " << rep.scenario << " (" << command << ")\n";
  std::cout << "  mean concavity: " << (f.mean_concavity.holds ? "holds" : "fails")
            << " (min eig " << f.mean_concavity.min_eig << ")\n";
  if (f.rank_G) std::cout << "  rank G: " << *f.rank_G << "\n";
  if (f.rank_condition) std::cout << "  rank condition: " << (*f.rank_condition ? "holds" : "fails") << "\n";
  if (f.cmsg_feasible) std::cout << "  constrained mean feasible: " << (*f.cmsg_feasible ? "yes" : "no") << "\n";
  if (f.ccsg_feasible) std::cout << "  constrained covariance feasible: " << (*f.ccsg_feasible ? "yes" : "no") << "\n";
  if (rep.jacobi) {
    std::cout << "  Jacobi: " << rep.jacobi->iterations << " iterations, " << rep.jacobi->message
              << ", constraint norm " << rep.jacobi->constraint_norm << "\n";
  }
  for (const auto& d : rep.diagnostics) std::cout << "  note: " << d << "\n";
  std::cout << "  wrote " << rep.files.size() << " files and report.json to " << outdir << "\n";

  if (rep.solver_failure) return kSolverFailure;
  if (strict && rep.infeasible) return kInfeasible;
  return kOk;
}
