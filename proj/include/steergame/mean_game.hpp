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

#include <string>
#include <vector>

#include "steergame/model.hpp"

namespace steergame {

// Saddle point of the unconstrained mean game.
struct MeanSaddle {
  Vector Ubar_star;
  Vector Vbar_star;
  double value = 0.0;
  // Scaled residuals of the two gradient equations at the solution.
  double grad_norm_u = 0.0;
  double grad_norm_v = 0.0;
};

struct RelativeControllability {
  Matrix G;  // n x Nm
  int rank = 0;
  Vector singvals;
  Matrix drift_map;  // Ā_N − C̄_N (𝒞ᵀQ̄𝒞 − S̄)⁻¹ 𝒞ᵀQ̄𝒜, applied to mu0 by the rank test
};

struct ConstrainedMeanSolution {
  Vector Ubar_c;
  Vector Vbar_c;  // stopper best response to Ubar_c
  Vector lambda;
  Matrix scriptR;
  Vector scriptM;
  double terminal_residual = 0.0;
  double gram_condition = 0.0;  // condition number of 𝒢 ℛ⁻¹ 𝒢ᵀ
  std::vector<std::string> warnings;
};

struct ConcavityCheck {
  bool holds = false;
  double min_eig = 0.0;  // smallest eigenvalue of S̄ − 𝒞ᵀQ̄𝒞
};

// Gradients of the mean payoff, halved:
//   (ℬᵀQ̄ℬ + R̄)Ū + ℬᵀQ̄𝒞V̄ + ℬᵀQ̄𝒜μ₀  and  (𝒞ᵀQ̄𝒞 − S̄)V̄ + 𝒞ᵀQ̄ℬŪ + 𝒞ᵀQ̄𝒜μ₀.
struct MeanGradients {
  Vector u;
  Vector v;
};
MeanGradients mean_gradients(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                             const Vector& Ubar, const Vector& Vbar);

ConcavityCheck check_mean_concavity(const LiftedSystem& sys, const CostWeights& w,
                                    double eig_tol = 1e-10);

MeanSaddle solve_umsg(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                      const Tolerances& tol = {});

Vector best_response_controller(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                                const Vector& Vbar);

Vector best_response_stopper(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                             const Vector& Ubar, double eig_tol = 1e-10);

RelativeControllability relative_controllability(const LiftedSystem& sys, const CostWeights& w,
                                                 const Tolerances& tol = {});

// rank[𝒢 | μ_N − drift·μ₀] == rank[𝒢]
bool check_rank_condition(const RelativeControllability& rc, const Vector& mu0,
                          const Vector& muN, double rank_tol = 1e-9);

// Upper game with the terminal mean constraint. Requires rank 𝒢 = n.
ConstrainedMeanSolution solve_cmsg_upper(const LiftedSystem& sys, const CostWeights& w,
                                         const Vector& mu0, const Vector& muN,
                                         const Tolerances& tol = {});

// Used when 𝒢 is rank deficient: the multiplier is taken from the pseudo-inverse
// of 𝒢ℛ⁻¹𝒢ᵀ restricted to its numerical range, so the terminal mean error is the
// least-squares one over the reachable directions.
ConstrainedMeanSolution solve_cmsg_least_squares(const LiftedSystem& sys, const CostWeights& w,
                                                 const Vector& mu0, const Vector& muN,
                                                 const Tolerances& tol = {});

}  // namespace steergame
