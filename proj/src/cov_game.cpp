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

#include "steergame/cov_game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steergame/errors.hpp"

namespace steergame {
namespace {

// Hessian of (G, H) ↦ tr(Gᵀ M H Σ) over the free entries of block-diagonal
// gains G (N p x (N+1)n) and H (N q x (N+1)n). Block (k, j) equals
// kron(M_kj, Σ_kj).
Matrix structured_hessian(const Matrix& M, const Matrix& Sigma, int N, int p, int q, int n) {
  const Eigen::Index rows = static_cast<Eigen::Index>(N) * p * n;
  const Eigen::Index cols = static_cast<Eigen::Index>(N) * q * n;
  Matrix out(rows, cols);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < N; ++j) {
      const Matrix Skj = Sigma.block(k * n, j * n, n, n);
      for (int a = 0; a < p; ++a) {
        for (int c = 0; c < q; ++c) {
          out.block((k * p + a) * n, (j * q + c) * n, n, n) = M(k * p + a, j * q + c) * Skj;
        }
      }
    }
  }
  return out;
}

void check_gain(const GainProfile& G, const LiftedSystem& sys, int rows, const char* name) {
  if (G.horizon() != sys.N || G.rows() != rows || G.n() != sys.n) {
    std::ostringstream os;
    os << name << " gain has shape (N=" << G.horizon() << ", " << G.rows() << "x" << G.n()
       << "), expected (N=" << sys.N << ", " << rows << "x" << sys.n << ")";
    throw DimensionError(os.str());
  }
}

Matrix closed_loop(const GainProfile& K, const GainProfile& L, const LiftedSystem& sys) {
  check_gain(K, sys, sys.m, "controller");
  check_gain(L, sys, sys.l, "stopper");
  const Eigen::Index dim = static_cast<Eigen::Index>(sys.N + 1) * sys.n;
  return Matrix::Identity(dim, dim) + sys.calB * K.lifted() + sys.calC * L.lifted();
}

double rel_scale(const Matrix& sym) {
  if (sym.size() == 0) return 1.0;
  return std::max(1.0, sym.cwiseAbs().maxCoeff());
}

}  // namespace

PriorCovariance build_sigma_s(const LiftedSystem& sys, const Matrix& Sigma0) {
  if (Sigma0.rows() != sys.n || Sigma0.cols() != sys.n) {
    throw DimensionError("Sigma0 must be n x n");
  }
  return {symmetrize(sys.calA * Sigma0 * sys.calA.transpose() + sys.calD * sys.calD.transpose())};
}

double cov_cost(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                const LiftedSystem& sys, const CostWeights& w) {
  const Matrix F = closed_loop(K, L, sys);
  const Matrix Kl = K.lifted();
  const Matrix Ll = L.lifted();
  return ((F.transpose() * w.Qbar * F + Kl.transpose() * w.Rbar * Kl -
           Ll.transpose() * w.Sbar * Ll) *
          prior.Sigma_s)
      .trace();
}

Matrix terminal_cov(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                    const LiftedSystem& sys) {
  const Matrix EF = sys.EN * closed_loop(K, L, sys);
  return symmetrize(EF * prior.Sigma_s * EF.transpose());
}

std::vector<Matrix> state_covariances(const GainProfile& K, const GainProfile& L,
                                      const PriorCovariance& prior, const LiftedSystem& sys) {
  const Matrix F = closed_loop(K, L, sys);
  const Matrix full = F * prior.Sigma_s * F.transpose();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(sys.N + 1));
  for (int k = 0; k <= sys.N; ++k) {
    out.push_back(symmetrize(full.block(k * sys.n, k * sys.n, sys.n, sys.n)));
  }
  return out;
}

double constraint_norm(const GainProfile& K, const GainProfile& L, const PriorCovariance& prior,
                       const Matrix& SigmaN, const LiftedSystem& sys) {
  if (SigmaN.rows() != sys.n || SigmaN.cols() != sys.n) throw DimensionError("SigmaN must be n x n");
  const Matrix inv_sqrt = pd_inv_sqrt(SigmaN);  // throws unless Σ_N ≻ 0
  const Matrix EF = sys.EN * closed_loop(K, L, sys);
  return spectral_norm(inv_sqrt * EF * psd_sqrt(prior.Sigma_s));
}

CovGradients cov_gradients(const GainProfile& K, const GainProfile& L,
                           const PriorCovariance& prior, const LiftedSystem& sys,
                           const CostWeights& w) {
  check_gain(K, sys, sys.m, "controller");
  check_gain(L, sys, sys.l, "stopper");
  const Matrix Kl = K.lifted();
  const Matrix Ll = L.lifted();
  const Matrix BtQ = sys.calB.transpose() * w.Qbar;
  const Matrix CtQ = sys.calC.transpose() * w.Qbar;
  CovGradients g;
  g.dK = (BtQ + w.Rbar * Kl + BtQ * sys.calB * Kl + BtQ * sys.calC * Ll) * prior.Sigma_s;
  g.dL = (CtQ - w.Sbar * Ll + CtQ * sys.calB * Kl + CtQ * sys.calC * Ll) * prior.Sigma_s;
  return g;
}

CurvatureReport check_cov_curvature(const PriorCovariance& prior, const LiftedSystem& sys,
                                    const CostWeights& w, double eig_tol) {
  const Matrix& Sig = prior.Sigma_s;
  const Matrix HK = symmetrize(sys.calB.transpose() * w.Qbar * sys.calB + w.Rbar);
  const Matrix HL = symmetrize(sys.calC.transpose() * w.Qbar * sys.calC - w.Sbar);

  CurvatureReport rep;
  rep.sigma_s_min_eig = min_eigenvalue(Sig);
  rep.hk_min_eig = min_eigenvalue(HK);
  rep.hl_max_eig = max_eigenvalue(HL);
  rep.prior_singular = rep.sigma_s_min_eig <= eig_tol * rel_scale(Sig);
  rep.convex_in_K = !rep.prior_singular && rep.hk_min_eig > eig_tol;
  rep.concave_in_L = !rep.prior_singular && rep.hl_max_eig < -eig_tol;

  const Matrix PKK = symmetrize(structured_hessian(HK, Sig, sys.N, sys.m, sys.m, sys.n));
  const Matrix PLL = symmetrize(structured_hessian(HL, Sig, sys.N, sys.l, sys.l, sys.n));
  rep.structured_k_min_eig = min_eigenvalue(PKK);
  rep.structured_l_max_eig = max_eigenvalue(PLL);
  rep.structured_convex_in_K = rep.structured_k_min_eig > eig_tol * rel_scale(PKK);
  rep.structured_concave_in_L = rep.structured_l_max_eig < -eig_tol * rel_scale(PLL);

  std::ostringstream os;
  if (rep.prior_singular) {
    os << "Σ_s is singular (min eig " << rep.sigma_s_min_eig
       << "); the Kronecker factors are only semidefinite, curvature judged on the gain pattern";
  }
  rep.note = os.str();
  return rep;
}

CovGame::CovGame(const LiftedSystem& sys, const CostWeights& w, const PriorCovariance& prior,
                 double eig_tol)
    : sys_(sys), w_(w), prior_(prior) {
  const int N = sys.N, n = sys.n, m = sys.m, l = sys.l;
  const Matrix& Sig = prior.Sigma_s;
  if (Sig.rows() != (N + 1) * n) throw DimensionError("Σ_s does not match the lifted system");
  const Matrix BtQ = sys.calB.transpose() * w.Qbar;
  const Matrix CtQ = sys.calC.transpose() * w.Qbar;
  const Matrix HK = symmetrize(BtQ * sys.calB + w.Rbar);
  const Matrix HL = symmetrize(CtQ * sys.calC - w.Sbar);
  P_KK_ = symmetrize(structured_hessian(HK, Sig, N, m, m, n));
  P_LL_ = symmetrize(structured_hessian(HL, Sig, N, l, l, n));
  P_KL_ = structured_hessian(BtQ * sys.calC, Sig, N, m, l, n);
  r_K_ = free_part(BtQ * Sig, N, m, n);
  r_L_ = free_part(CtQ * Sig, N, l, n);
  constant_ = (w.Qbar * Sig).trace();
  sigma_sqrt_ = psd_sqrt(Sig);
  curvature_ = check_cov_curvature(prior, sys, w, eig_tol);
}

void CovGame::require_structured_convexity() const {
  if (!curvature_.structured_convex_in_K) {
    throw AssumptionViolation("J_Σ is not strictly convex in the controller gain",
                              curvature_.structured_k_min_eig);
  }
}

void CovGame::require_structured_concavity() const {
  if (!curvature_.structured_concave_in_L) {
    throw AssumptionViolation("J_Σ is not strictly concave in the stopper gain",
                              curvature_.structured_l_max_eig);
  }
}

double CovGame::value(const GainProfile& K, const GainProfile& L) const {
  const Vector xK = K.free_vector();
  const Vector xL = L.free_vector();
  return constant_ + 2.0 * r_K_.dot(xK) + 2.0 * r_L_.dot(xL) + xK.dot(P_KK_ * xK) +
         2.0 * xK.dot(P_KL_ * xL) + xL.dot(P_LL_ * xL);
}

GainProfile CovGame::stopper_step(const GainProfile& K) const {
  check_gain(K, sys_, sys_.m, "controller");
  require_structured_concavity();
  Eigen::LLT<Matrix> llt(-P_LL_);
  if (llt.info() != Eigen::Success) throw SolverError("stopper Hessian is not negative definite");
  const Vector xL = llt.solve(r_L_ + P_KL_.transpose() * K.free_vector());
  return GainProfile::from_free(xL, sys_.N, sys_.l, sys_.n);
}

GainProfile CovGame::controller_best_response(const GainProfile& L) const {
  check_gain(L, sys_, sys_.l, "stopper");
  require_structured_convexity();
  Eigen::LLT<Matrix> llt(P_KK_);
  if (llt.info() != Eigen::Success) throw SolverError("controller Hessian is not positive definite");
  const Vector xK = -llt.solve(r_K_ + P_KL_ * L.free_vector());
  return GainProfile::from_free(xK, sys_.N, sys_.m, sys_.n);
}

RankOneAffineMap CovGame::constraint_map(const GainProfile& L, const Matrix& SigmaN) const {
  check_gain(L, sys_, sys_.l, "stopper");
  if (SigmaN.rows() != sys_.n || SigmaN.cols() != sys_.n) throw DimensionError("SigmaN must be n x n");
  const int N = sys_.N, n = sys_.n, m = sys_.m;
  const Matrix inv_sqrt = pd_inv_sqrt(SigmaN);
  RankOneAffineMap map;
  map.W0 = inv_sqrt * (sys_.EN + sys_.Cbar(N) * L.lifted()) * sigma_sqrt_;
  const Matrix UB = inv_sqrt * sys_.Bbar(N);  // n x Nm
  const Eigen::Index p = static_cast<Eigen::Index>(N) * m * n;
  map.U.resize(n, p);
  map.S.resize(sigma_sqrt_.cols(), p);
  Eigen::Index idx = 0;
  for (int k = 0; k < N; ++k) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < n; ++b, ++idx) {
        map.U.col(idx) = UB.col(k * m + a);
        map.S.col(idx) = sigma_sqrt_.row(k * n + b).transpose();
      }
    }
  }
  return map;
}

double CovGame::min_constraint_norm(const GainProfile& L, const Matrix& SigmaN,
                                    const GainProfile& warm) const {
  check_gain(warm, sys_, sys_.m, "controller");
  const RankOneAffineMap map = constraint_map(L, SigmaN);
  return minimize_spectral_norm(map, warm.free_vector(), 0.0).norm;
}

GainProfile CovGame::controller_step(const GainProfile& L, const Matrix& SigmaN,
                                     const GainProfile& warm, const KStepOptions& opts,
                                     KStepInfo* info) const {
  check_gain(warm, sys_, sys_.m, "controller");
  require_structured_convexity();
  const RankOneAffineMap map = constraint_map(L, SigmaN);
  const Matrix P = 2.0 * P_KK_;
  const Vector q = 2.0 * (r_K_ + P_KL_ * L.free_vector());
  BarrierOptions bopts = opts.barrier;
  bopts.gap_tol = std::min(bopts.gap_tol, opts.solver_tol);
  const SpectralQpResult res = solve_spectral_qp(P, q, map, warm.free_vector(), opts.feas_tol, bopts);
  if (info) {
    info->constraint_norm = res.norm;
    info->gap = res.gap;
    info->constraint_active = res.constraint_active;
    info->newton_steps = res.newton_steps;
  }
  return GainProfile::from_free(res.x, sys_.N, sys_.m, sys_.n);
}

UcsgSolution CovGame::solve_ucsg_stationary() const {
  require_structured_convexity();
  require_structured_concavity();
  const Eigen::Index pk = P_KK_.rows(), pl = P_LL_.rows();
  Matrix H(pk + pl, pk + pl);
  H << P_KK_, P_KL_, P_KL_.transpose(), P_LL_;
  Vector rhs(pk + pl);
  rhs << -r_K_, -r_L_;
  Eigen::FullPivLU<Matrix> lu(H);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "stationarity system is singular (rank " << lu.rank() << " of " << H.rows() << ")";
    throw SolverError(os.str());
  }
  const Vector z = lu.solve(rhs);

  UcsgSolution sol;
  sol.K = GainProfile::from_free(z.head(pk), sys_.N, sys_.m, sys_.n);
  sol.L = GainProfile::from_free(z.tail(pl), sys_.N, sys_.l, sys_.n);
  const CovGradients g = cov_gradients(sol.K, sol.L, prior_, sys_, w_);
  sol.multipliers.Theta = -zero_pattern_part(g.dK, sys_.N, sys_.m, sys_.n);
  sol.multipliers.Xi = -zero_pattern_part(g.dL, sys_.N, sys_.l, sys_.n);
  const double free_res = std::hypot(free_part(g.dK, sys_.N, sys_.m, sys_.n).norm(),
                                     free_part(g.dL, sys_.N, sys_.l, sys_.n).norm());
  sol.stationarity_residual = free_res / std::max(1.0, rhs.norm());
  return sol;
}

std::pair<GainProfile, GainProfile> CovGame::fallback_solve() const {
  require_structured_concavity();
  // L(x_K) = −P_LL⁻¹ (r_L + P_KLᵀ x_K); the composition is quadratic in x_K
  // with Hessian (halved) P_KK − P_KL P_LL⁻¹ P_KLᵀ.
  Eigen::LLT<Matrix> neg_ll(-P_LL_);
  if (neg_ll.info() != Eigen::Success) throw SolverError("stopper Hessian is not negative definite");
  const Matrix inv_PLK = neg_ll.solve(P_KL_.transpose());  // (−P_LL)⁻¹ P_LK
  const Matrix Hc = symmetrize(P_KK_ + P_KL_ * inv_PLK);
  const double hmin = min_eigenvalue(Hc);
  if (hmin <= 1e-12 * rel_scale(Hc)) {
    std::ostringstream os;
    os << "composed controller cost is not strictly convex (min eig " << hmin << ")";
    throw AssumptionViolation(os.str(), hmin);
  }
  const Vector lin = r_K_ + P_KL_ * neg_ll.solve(r_L_);
  const Vector xK = -Hc.llt().solve(lin);
  const Vector xL = neg_ll.solve(r_L_ + P_KL_.transpose() * xK);
  return {GainProfile::from_free(xK, sys_.N, sys_.m, sys_.n),
          GainProfile::from_free(xL, sys_.N, sys_.l, sys_.n)};
}

GainProfile stopper_step(const GainProfile& K, const LiftedSystem& sys, const CostWeights& w,
                         const PriorCovariance& prior) {
  return CovGame(sys, w, prior).stopper_step(K);
}

GainProfile controller_step(const GainProfile& L, const LiftedSystem& sys, const CostWeights& w,
                            const PriorCovariance& prior, const GaussianBoundary& boundary,
                            const KStepOptions& opts) {
  return CovGame(sys, w, prior)
      .controller_step(L, boundary.SigmaN, GainProfile::zeros(sys.N, sys.m, sys.n), opts);
}

UcsgSolution solve_ucsg_stationary(const LiftedSystem& sys, const CostWeights& w,
                                   const PriorCovariance& prior) {
  return CovGame(sys, w, prior).solve_ucsg_stationary();
}

std::pair<GainProfile, GainProfile> fallback_solve(const LiftedSystem& sys, const CostWeights& w,
                                                   const PriorCovariance& prior) {
  return CovGame(sys, w, prior).fallback_solve();
}

JacobiTrace jacobi_solve(const LiftedSystem& sys, const CostWeights& w,
                         const PriorCovariance& prior, const GaussianBoundary& boundary,
                         const JacobiOptions& opts) {
  const CovGame game(sys, w, prior);
  const CurvatureReport& curv = game.curvature();
  if (!curv.structured_convex_in_K || !curv.structured_concave_in_L) {
    throw AssumptionViolation("Jacobi procedure needs a convex-concave gain game",
                              std::min(curv.structured_k_min_eig, -curv.structured_l_max_eig));
  }
  pd_inv_sqrt(boundary.SigmaN);  // Σ_N ≻ 0

  GainProfile K = opts.K0.value_or(GainProfile::zeros(sys.N, sys.m, sys.n));
  GainProfile L = opts.L0.value_or(GainProfile::zeros(sys.N, sys.l, sys.n));
  check_gain(K, sys, sys.m, "initial controller");
  check_gain(L, sys, sys.l, "initial stopper");

  JacobiTrace trace;
  trace.iterates.push_back({K, L, game.value(K, L)});
  const double slack = 1e-9;
  for (int i = 0; i < opts.max_iter; ++i) {
    const double J_now = game.value(K, L);
    const GainProfile L_next = game.stopper_step(K);
    GainProfile K_next;
    try {
      K_next = game.controller_step(L, boundary.SigmaN, K, opts.kstep);
    } catch (const InfeasibleCovariance& e) {
      trace.feasible = false;
      trace.infeasible_min_norm = e.min_norm();
      trace.fallback = game.fallback_solve();
      trace.message = e.what();
      trace.achieved_SigmaN = terminal_cov(trace.fallback->first, trace.fallback->second, prior, sys);
      trace.constraint_norm =
          constraint_norm(trace.fallback->first, trace.fallback->second, prior, boundary.SigmaN, sys);
      return trace;
    }
    const double scale = slack * std::max(1.0, std::abs(J_now));
    if (game.value(K, L_next) < J_now - scale) trace.steps_monotone = false;
    if (constraint_norm(K, L, prior, boundary.SigmaN, sys) <= 1.0 &&
        game.value(K_next, L) > J_now + scale) {
      trace.steps_monotone = false;
    }
    trace.eps_k.push_back(K_next.distance(K));
    trace.eps_l.push_back(L_next.distance(L));
    K = std::move(K_next);
    L = L_next;
    trace.iterates.push_back({K, L, game.value(K, L)});
    trace.iterations = i + 1;
    // K was fitted against the previous L, so the returned pair is also
    // required to meet the bound before stopping.
    if (trace.eps_k.back() <= opts.epsilon && trace.eps_l.back() <= opts.epsilon &&
        constraint_norm(K, L, prior, boundary.SigmaN, sys) <= 1.0 + opts.kstep.feas_tol) {
      trace.converged = true;
      break;
    }
  }
  trace.achieved_SigmaN = terminal_cov(K, L, prior, sys);
  trace.constraint_norm = constraint_norm(K, L, prior, boundary.SigmaN, sys);
  trace.feasible = trace.constraint_norm <= 1.0 + opts.kstep.feas_tol;
  trace.message = trace.converged ? "converged" : "iteration limit reached";
  return trace;
}

}  // namespace steergame
