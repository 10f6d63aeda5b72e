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

#include <vector>

#include "steergame/linalg.hpp"

namespace steergame {

struct Tolerances {
  double eig_tol = 1e-10;    // definiteness checks
  double rank_tol = 1e-9;    // numerical rank, relative to sigma_max
  double kkt_tol = 1e-8;     // gradient residuals, scaled
  double feas_tol = 1e-6;    // covariance constraint slack
  double solver_tol = 1e-7;  // K-step duality gap
};

// Per-stage dynamics x_{k+1} = A_k x_k + B_k u_k + C_k v_k + D_k w_k.
class StageSystem {
 public:
  StageSystem(std::vector<Matrix> A, std::vector<Matrix> B, std::vector<Matrix> C,
              std::vector<Matrix> D);

  // Same matrices at every stage.
  static StageSystem time_invariant(const Matrix& A, const Matrix& B, const Matrix& C,
                                    const Matrix& D, int horizon);

  int horizon() const { return static_cast<int>(A_.size()); }
  int n() const { return static_cast<int>(A_[0].rows()); }
  int m() const { return static_cast<int>(B_[0].cols()); }
  int l() const { return static_cast<int>(C_[0].cols()); }
  int r() const { return static_cast<int>(D_[0].cols()); }

  const Matrix& A(int k) const { return A_[k]; }
  const Matrix& B(int k) const { return B_[k]; }
  const Matrix& C(int k) const { return C_[k]; }
  const Matrix& D(int k) const { return D_[k]; }

  // Step-by-step recursion. U, V, W are stacked per-stage inputs; returns
  // the stacked states x_0 ... x_N.
  Vector propagate(const Vector& x0, const Vector& U, const Vector& V, const Vector& W) const;

 private:
  std::vector<Matrix> A_, B_, C_, D_;
};

// Horizon-length matrices acting on the stacked state X = [x_0; ...; x_N]:
//   X = calA x_0 + calB U + calC V + calD W.
struct LiftedSystem {
  int N = 0, n = 0, m = 0, l = 0, r = 0;
  Matrix calA, calB, calC, calD;
  Matrix E0, EN;

  // Selector E_k (n x (N+1)n).
  Matrix selector(int k) const;
  // Block row k of each lifted matrix, i.e. E_k times it.
  Matrix Abar(int k) const { return calA.middleRows(k * n, n); }
  Matrix Bbar(int k) const { return calB.middleRows(k * n, n); }
  Matrix Cbar(int k) const { return calC.middleRows(k * n, n); }
  Matrix Dbar(int k) const { return calD.middleRows(k * n, n); }

  Vector propagate(const Vector& x0, const Vector& U, const Vector& V, const Vector& W) const;
};

LiftedSystem lift(const StageSystem& sys);

struct StageWeights {
  std::vector<Matrix> Q;  // N+1 entries; the last one is ignored (forced zero)
  std::vector<Matrix> R;  // N entries
  std::vector<Matrix> S;  // N entries

  static StageWeights time_invariant(const Matrix& Q, const Matrix& R, const Matrix& S,
                                     int horizon);
};

struct CostWeights {
  StageWeights stages;  // with Q_N zeroed
  Matrix Qbar;          // blkdiag(Q_0, ..., Q_{N-1}, 0)
  Matrix Rbar;          // blkdiag(R_0, ..., R_{N-1})
  Matrix Sbar;          // blkdiag(S_0, ..., S_{N-1})
};

CostWeights lift_weights(const StageWeights& w, double eig_tol = 1e-10);

struct GaussianBoundary {
  Vector mu0;
  Matrix Sigma0;
  Vector muN;
  Matrix SigmaN;
};

// Validates sizes, symmetry (relative asymmetry <= 1e-12) and Sigma0 >= 0,
// then returns a copy with both covariances exactly symmetric.
GaussianBoundary make_boundary(Vector mu0, Matrix Sigma0, Vector muN, Matrix SigmaN,
                               double eig_tol = 1e-10);

struct MeanTrajectory {
  Vector Xbar;
  Vector Ubar;
  Vector Vbar;
  // x̄_k as an n-vector.
  Vector state(int k, int n) const { return Xbar.segment(k * n, n); }
};

MeanTrajectory mean_trajectory(const LiftedSystem& sys, const Vector& mu0, const Vector& Ubar,
                               const Vector& Vbar);

class GainProfile;

// X̄ᵀQ̄X̄ + ŪᵀR̄Ū − V̄ᵀS̄V̄
double mean_cost(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                 const Vector& Ubar, const Vector& Vbar);

struct PayoffBreakdown {
  double total = 0.0;  // from second moments of (X, U, V)
  double mean = 0.0;
  double cov = 0.0;
};

// Evaluates the expected payoff of the mixed policy u = ū + K y, v = v̄ + L y.
// `total` is assembled from the full second-moment matrices E[XXᵀ], E[UUᵀ],
// E[VVᵀ]; `mean` and `cov` are the separated parts, so total == mean + cov
// up to rounding.
PayoffBreakdown payoff(const LiftedSystem& sys, const CostWeights& w, const GaussianBoundary& b,
                       const Vector& Ubar, const Vector& Vbar, const GainProfile& K,
                       const GainProfile& L);

}  // namespace steergame
