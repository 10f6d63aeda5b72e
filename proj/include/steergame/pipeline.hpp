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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steergame/cov_game.hpp"
#include "steergame/mean_game.hpp"
#include "steergame/montecarlo.hpp"
#include "steergame/scenario.hpp"

namespace steergame {

enum class Command { SolveUnconstrained, SolveConstrained, Simulate, All };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct FileRecord {
  std::string path;  // relative to the output directory
  std::string sha256;  // over all lines not starting with '#'
};

struct Feasibility {
  ConcavityCheck mean_concavity;
  std::optional<int> rank_G;
  std::optional<bool> rank_condition;
  std::optional<CurvatureReport> cov_curvature;
  std::optional<bool> ccsg_feasible;
  std::optional<bool> cmsg_feasible;
};

struct RunReport {
  std::string scenario;
  Command command = Command::All;
  Feasibility feasibility;

  std::optional<MeanSaddle> saddle;
  std::optional<UcsgSolution> ucsg;
  std::optional<RelativeControllability> controllability;
  std::optional<ConstrainedMeanSolution> constrained;
  std::optional<JacobiTrace> jacobi;
  std::optional<EmpiricalMoments> moments;

  std::string mean_source;  // "constrained", "least-squares constrained" or empty
  std::string gain_source;  // "jacobi", "fallback" or empty
  std::optional<Vector> terminal_mean;
  std::optional<Matrix> terminal_cov;

  bool infeasible = false;
  bool solver_failure = false;
  std::vector<std::string> diagnostics;
  std::vector<FileRecord> files;
};

std::string sha256_hex(const std::string& bytes);
// Digest of the content with '#' comment lines removed.
std::string content_digest(const std::string& bytes);

RunReport run(const Scenario& scenario, Command command, const std::string& outdir);

std::string report_json(const RunReport& report);

}  // namespace steergame
