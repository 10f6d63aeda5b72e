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
#include <vector>

#include "steergame/gain.hpp"
#include "steergame/model.hpp"

namespace steergame {

// Row i of each array is one trajectory, stage-major: entry (i, k*n + j) is
// component j at stage k.
struct RolloutBatch {
  int samples = 0;
  std::uint64_t seed = 0;
  int N = 0, n = 0, m = 0, l = 0;
  Matrix states;      // samples x (N+1)n
  Matrix controls_u;  // samples x Nm
  Matrix controls_v;  // samples x Nl
  Matrix aux_y;       // samples x (N+1)n

  Vector state(int i, int k) const { return states.row(i).segment(k * n, n).transpose(); }
};

struct RolloutOptions {
  int threads = 0;  // 0: hardware concurrency
};

// Per-trajectory generator is std::mt19937_64 seeded with seed ^ index, so the
// batch does not depend on how trajectories are split across threads.
RolloutBatch rollout(const StageSystem& sys, const GaussianBoundary& boundary, const Vector& Ubar,
                     const Vector& Vbar, const GainProfile& K, const GainProfile& L, int samples,
                     std::uint64_t seed, const RolloutOptions& opts = {});

struct EmpiricalMoments {
  std::vector<Vector> mean_k;
  std::vector<Matrix> cov_k;
  std::vector<Vector> mean_stderr_k;
  std::vector<Matrix> cov_stderr_k;
  std::optional<double> cost_estimate;
  std::optional<double> cost_stderr;
};

EmpiricalMoments empirical_moments(const RolloutBatch& batch,
                                   const CostWeights* weights = nullptr);

std::vector<Eigen::Vector2d> ellipse_points(const Vector& mean, const Matrix& cov,
                                            std::pair<int, int> dims, double nsigma,
                                            int npoints);

}  // namespace steergame
