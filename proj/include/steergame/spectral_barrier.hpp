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

#include "steergame/linalg.hpp"

namespace steergame {

// Affine matrix map W(x) = W0 + Σ_i x_i u_i s_iᵀ where every direction is a
// rank-one matrix. U holds the u_i as columns (n x p), S the s_i (c x p).
struct RankOneAffineMap {
  Matrix W0;
  Matrix U;
  Matrix S;

  Eigen::Index params() const { return U.cols(); }
  Matrix eval(const Vector& x) const { return W0 + U * x.asDiagonal() * S.transpose(); }
};

struct BarrierOptions {
  double gap_tol = 1e-9;   // relative to max(1, |objective|)
  double growth = 10.0;    // barrier weight multiplier per outer iteration
  int max_newton = 500;    // total Newton steps
};

struct SpectralQpResult {
  Vector x;
  double objective = 0.0;
  double norm = 0.0;  // ‖W(x)‖₂ at the returned point
  double gap = 0.0;   // duality gap bound at exit (0 when the constraint is inactive)
  int newton_steps = 0;
  bool constraint_active = false;
};

struct NormMinResult {
  Vector x;
  double norm = 0.0;   // ‖W(x)‖₂ at the returned point
  double bound = 0.0;  // sqrt of the epigraph variable; >= norm
  double gap = 0.0;    // bound on (norm² at x) − (optimal norm²)
  bool stopped_early = false;
};

// Minimizes ‖W(x)‖₂ by path following on −log det(τI − WWᵀ) in (x, τ).
// Returns as soon as τ < stop_below² when stop_below > 0; with
// stop_below <= 0 it runs to the gap tolerance.
NormMinResult minimize_spectral_norm(const RankOneAffineMap& map, const Vector& x_start,
                                     double stop_below, const BarrierOptions& opts = {});

// Minimizes ½xᵀPx + qᵀx subject to ‖W(x)‖₂ <= 1 for P ≻ 0. The start point
// only seeds the feasibility phase; if the unconstrained minimizer already
// satisfies the bound it is returned unchanged. Throws InfeasibleCovariance
// when the smallest attainable norm exceeds 1 + feas_tol.
SpectralQpResult solve_spectral_qp(const Matrix& P, const Vector& q, const RankOneAffineMap& map,
                                   const Vector& x_start, double feas_tol,
                                   const BarrierOptions& opts = {});

}  // namespace steergame
