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

#include "steergame/gain.hpp"
#include "steergame/model.hpp"
#include "steergame/spectral_barrier.hpp"

namespace steergame {

// Σ_s = 𝒜Σ₀𝒜ᵀ + 𝒟𝒟ᵀ, the covariance of the stacked open-loop deviation Y.
struct PriorCovariance {
  Matrix Sigma_s;
};

PriorCovariance build_sigma_s(const LiftedSystem& sys, const Matrix& Sigma0);

// tr(((I + ℬK + 𝒞L)ᵀQ̄(I + ℬK + 𝒞L) + KᵀR̄K − LᵀS̄L)Σ_s)
double cov_cost(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                const LiftedSystem& sys, const CostWeights& w);

// E_N (I + ℬK + 𝒞L) Σ_s (I + ℬK + 𝒞L)ᵀ E_Nᵀ
Matrix terminal_cov(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                    const LiftedSystem& sys);

// Closed-loop state covariance at every step, Σ_0 ... Σ_N.
std::vector<Matrix> state_covariances(const GainProfile& K, const GainProfile& L,
                                      const PriorCovariance& prior, const LiftedSystem& sys);

// ‖Σ_N^{-1/2} E_N (I + ℬK + 𝒞L) Σ_s^{1/2}‖₂. Requires Σ_N ≻ 0.
double constraint_norm(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                       const Matrix& SigmaN, const LiftedSystem& sys);

// Halved gradients of J_Σ with respect to the full gain matrices:
//   [ℬᵀQ̄ + R̄K + ℬᵀQ̄ℬK + ℬᵀQ̄𝒞L] Σ_s  and  [𝒞ᵀQ̄ − S̄L + 𝒞ᵀQ̄ℬK + 𝒞ᵀQ̄𝒞L] Σ_s.
struct CovGradients {
  Matrix dK;
  Matrix dL;
};
CovGradients cov_gradients(const GainProfile& K, const GainProfile& L,
                           const PriorCovariance& prior, const LiftedSystem& sys,
                           const CostWeights& w);

struct CurvatureReport {
  // Kronecker-factor verdicts: Σ_s ≻ 0 together with ℬᵀQ̄ℬ + R̄ ≻ 0
  // (resp. 𝒞ᵀQ̄𝒞 − S̄ ≺ 0).
  bool convex_in_K = false;
  bool concave_in_L = false;
  // Verdicts for the quadratic restricted to block-diagonal gains, taken from
  // the eigenvalues of the structured Hessians. These are what the solvers
  // require; they coincide with the factor verdicts when Σ_s ≻ 0.
  bool structured_convex_in_K = false;
  bool structured_concave_in_L = false;
  bool prior_singular = false;
  double sigma_s_min_eig = 0.0;
  double hk_min_eig = 0.0;         // of ℬᵀQ̄ℬ + R̄
  double hl_max_eig = 0.0;         // of 𝒞ᵀQ̄𝒞 − S̄
  double structured_k_min_eig = 0.0;
  double structured_l_max_eig = 0.0;
  std::string note;
};

CurvatureReport check_cov_curvature(const PriorCovariance& prior, const LiftedSystem& sys,
                                    const CostWeights& w, double eig_tol = 1e-10);

// Multipliers on the structural zeros of K and L.
struct StructureMultipliers {
  Matrix Theta;
  Matrix Xi;
};

struct UcsgSolution {
  GainProfile K;
  GainProfile L;
  StructureMultipliers multipliers;
  double stationarity_residual = 0.0;  // free-pattern gradient norm, relative
};

struct KStepOptions {
  double feas_tol = 1e-6;
  double solver_tol = 1e-7;
  BarrierOptions barrier{};
};

struct KStepInfo {
  double constraint_norm = 0.0;
  double gap = 0.0;
  bool constraint_active = false;
  int newton_steps = 0;
};

// Precomputed quadratic structure of J_Σ over the free gain entries:
//
//   J_Σ = tr(Q̄Σ_s) + 2 r_Kᵀx_K + 2 r_Lᵀx_L + x_KᵀP_KK x_K + 2 x_KᵀP_KL x_L + x_LᵀP_LL x_L
//
// with x_K, x_L the free-vectors of K and L.
class CovGame {
 public:
  CovGame(const LiftedSystem& sys, const CostWeights& w, const PriorCovariance& prior,
          double eig_tol = 1e-10);

  const LiftedSystem& system() const { return sys_; }
  const CostWeights& weights() const { return w_; }
  const PriorCovariance& prior() const { return prior_; }
  const CurvatureReport& curvature() const { return curvature_; }

  const Matrix& P_KK() const { return P_KK_; }
  const Matrix& P_KL() const { return P_KL_; }
  const Matrix& P_LL() const { return P_LL_; }
  const Vector& r_K() const { return r_K_; }
  const Vector& r_L() const { return r_L_; }
  double constant() const { return constant_; }

  double value(const GainProfile& K, const GainProfile& L) const;

  // argmax_L J_Σ(K, L) over block-diagonal L.
  GainProfile stopper_step(const GainProfile& K) const;

  // argmin_K J_Σ(K, L) over block-diagonal K with the terminal bound
  // ‖Σ_N^{-1/2}E_N(I + ℬK + 𝒞L)Σ_s^{1/2}‖₂ <= 1. `warm` seeds the
  // feasibility search. Throws InfeasibleCovariance.
  GainProfile controller_step(const GainProfile& L, const Matrix& SigmaN, const GainProfile& warm,
                              const KStepOptions& opts = {}, KStepInfo* info = nullptr) const;

  // Unconstrained argmin_K J_Σ(K, L).
  GainProfile controller_best_response(const GainProfile& L) const;

  // Smallest attainable constraint norm over K for the given L.
  double min_constraint_norm(const GainProfile& L, const Matrix& SigmaN,
                             const GainProfile& warm) const;

  UcsgSolution solve_ucsg_stationary() const;

  // argmin_K J_Σ(K, L(K)) where L(K) is the stopper's best response.
  std::pair<GainProfile, GainProfile> fallback_solve() const;

  // Constraint map of the K-step for fixed L.
  RankOneAffineMap constraint_map(const GainProfile& L, const Matrix& SigmaN) const;

 private:
  void require_structured_convexity() const;
  void require_structured_concavity() const;

  LiftedSystem sys_;
  CostWeights w_;
  PriorCovariance prior_;
  Matrix sigma_sqrt_;
  Matrix P_KK_, P_KL_, P_LL_;
  Vector r_K_, r_L_;
  double constant_ = 0.0;
  CurvatureReport curvature_;
};

// Free-function forms of the CovGame operations.
GainProfile stopper_step(const GainProfile& K, const LiftedSystem& sys, const CostWeights& w,
                         const PriorCovariance& prior);
GainProfile controller_step(const GainProfile& L, const LiftedSystem& sys, const CostWeights& w,
                            const PriorCovariance& prior, const GaussianBoundary& boundary,
                            const KStepOptions& opts = {});
UcsgSolution solve_ucsg_stationary(const LiftedSystem& sys, const CostWeights& w,
                                   const PriorCovariance& prior);
std::pair<GainProfile, GainProfile> fallback_solve(const LiftedSystem& sys, const CostWeights& w,
                                                   const PriorCovariance& prior);

struct JacobiOptions {
  double epsilon = 1e-5;
  int max_iter = 200;
  std::optional<GainProfile> K0;
  std::optional<GainProfile> L0;
  KStepOptions kstep{};
};

struct JacobiIterate {
  GainProfile K;
  GainProfile L;
  double J = 0.0;
};

struct JacobiTrace {
  std::vector<JacobiIterate> iterates;  // iterate 0 is the starting pair
  std::vector<double> eps_k;
  std::vector<double> eps_l;
  bool converged = false;
  int iterations = 0;
  bool feasible = false;
  Matrix achieved_SigmaN;
  double constraint_norm = 0.0;
  // Monotonicity of the individual steps (asserted with 1e-9 slack).
  bool steps_monotone = true;
  // Present when a K-step proved the bound unattainable.
  std::optional<double> infeasible_min_norm;
  std::optional<std::pair<GainProfile, GainProfile>> fallback;
  std::string message;

  const GainProfile& K() const { return iterates.back().K; }
  const GainProfile& L() const { return iterates.back().L; }
};

// Alternates L_{i+1} = argmax_L J_Σ(K_i, L) and K_{i+1} = argmin_{K ∈ 𝒦(L_i)} J_Σ(K, L_i)
// until both step norms fall below epsilon.
JacobiTrace jacobi_solve(const LiftedSystem& sys, const CostWeights& w,
                         const PriorCovariance& prior, const GaussianBoundary& boundary,
                         const JacobiOptions& opts = {});

}  // namespace steergame
