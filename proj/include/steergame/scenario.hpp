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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "steergame/model.hpp"

namespace steergame {

enum class ScenarioMode { Lti, Ltv, Continuous };

struct ContinuousModel {
  Matrix Ac, Bc, Cc;
  Matrix Gamma;  // noise input direction, n x r
  double dt = 0.0;
  double alpha = 0.0;
};

struct SolverSettings {
  double epsilon = 1e-5;
  int max_iter = 200;
  std::uint64_t seed = 0;
  int samples = 100;
  int threads = 0;
  Tolerances tol{};
};

struct PlotSettings {
  std::pair<int, int> dims{0, 1};
  std::string aspect = "equal";  // "equal" or "skewed"
  std::string kind = "phase";    // "phase" (two-state plane) or "timeseries" (one state vs step)
  int trajectories = 100;        // sampled trajectories written to CSV
  double closing_speed = 0.0;    // timeseries only: range axis for the planar view
  double initial_range = 0.0;
};

struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::Lti;
  StageSystem system;
  std::optional<ContinuousModel> continuous;
  GaussianBoundary boundary;
  StageWeights weights;
  SolverSettings solver;
  PlotSettings plot;
};

struct DiscreteStage {
  Matrix A, B, C, D;
};

// Zero-order-hold discretization through the exponential of the augmented
// matrix [[Ac, I], [0, 0]] dt. D = alpha * (int_0^dt exp(Ac s) ds) * Gamma; an
// empty Gamma means identity.
DiscreteStage discretize_continuous(const Matrix& Ac, const Matrix& Bc, const Matrix& Cc,
                                    double dt, double alpha, const Matrix& Gamma = Matrix());

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace steergame
