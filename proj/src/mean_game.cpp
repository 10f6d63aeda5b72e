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

#include "steergame/mean_game.hpp"

#include <limits>
#include <sstream>

#include "steergame/errors.hpp"

namespace steergame {
namespace {

// Blocks of the mean game Hessian and the μ₀-dependent linear terms.
struct MeanBlocks {
  Matrix Huu;  // ℬᵀQ̄ℬ + R̄
  Matrix Huv;  // ℬᵀQ̄𝒞
  Matrix Hvv;  // 𝒞ᵀQ̄𝒞 − S̄
  Matrix BtQA;
  Matrix CtQA;
};

MeanBlocks mean_blocks(const LiftedSystem& sys, const CostWeights& w) {
  const Matrix QB = w.Qbar * sys.calB;
  const Matrix QC = w.Qbar * sys.calC;
  const Matrix QA = w.Qbar * sys.calA;
  MeanBlocks mb;
  mb.Huu = symmetrize(sys.calB.transpose() * QB + w.Rbar);
  mb.Huv = sys.calB.transpose() * QC;
  mb.Hvv = symmetrize(sys.calC.transpose() * QC - w.Sbar);
  mb.BtQA = sys.calB.transpose() * QA;
  mb.CtQA = sys.calC.transpose() * QA;
  return mb;
}

void require_concavity(const LiftedSystem& sys, const CostWeights& w, double eig_tol) {
  const ConcavityCheck cc = check_mean_concavity(sys, w, eig_tol);
  if (!cc.holds) {
    std::ostringstream os;
    os << "mean game is not concave in the stopper input: min eig of S̄ − 𝒞ᵀQ̄𝒞 is " << cc.min_eig;
    throw AssumptionViolation(os.str(), cc.min_eig);
  }
}

void check_mu(const LiftedSystem& sys, const Vector& mu, const char* name) {
  if (mu.size() != sys.n) throw DimensionError(std::string(name) + " must have length n");
}

}  // namespace

MeanGradients mean_gradients(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                             const Vector& Ubar, const Vector& Vbar) {
  const MeanBlocks mb = mean_blocks(sys, w);
  return {mb.Huu * Ubar + mb.Huv * Vbar + mb.BtQA * mu0,
          mb.Hvv * Vbar + mb.Huv.transpose() * Ubar + mb.CtQA * mu0};
}

ConcavityCheck check_mean_concavity(const LiftedSystem& sys, const CostWeights& w,
                                    double eig_tol) {
  const Matrix M = w.Sbar - sys.calC.transpose() * w.Qbar * sys.calC;
  const double me = min_eigenvalue(M);
  return {me > eig_tol, me};
}

MeanSaddle solve_umsg(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                      const Tolerances& tol) {
  check_mu(sys, mu0, "mu0");
  require_concavity(sys, w, tol.eig_tol);
  const MeanBlocks mb = mean_blocks(sys, w);

  // Eliminate V̄ through the negative definite (2,2) block, then solve the
  // positive definite Schur complement for Ū.
  Eigen::LLT<Matrix> neg_hvv(-mb.Hvv);
  if (neg_hvv.info() != Eigen::Success) throw SolverError("stopper block is not negative definite");
  const Matrix Hvv_inv_Hvu = -neg_hvv.solve(mb.Huv.transpose());  // H_vv⁻¹ H_vu
  const Vector Hvv_inv_c = -neg_hvv.solve(mb.CtQA * mu0);         // H_vv⁻¹ 𝒞ᵀQ̄𝒜μ₀
  const Matrix schur = symmetrize(mb.Huu - mb.Huv * Hvv_inv_Hvu);
  Eigen::LLT<Matrix> schur_llt(schur);
  if (schur_llt.info() != Eigen::Success) throw SolverError("saddle system is singular");

  MeanSaddle out;
  out.Ubar_star = -schur_llt.solve(mb.BtQA * mu0 - mb.Huv * Hvv_inv_c);
  out.Vbar_star = -(Hvv_inv_Hvu * out.Ubar_star + Hvv_inv_c);
  out.value = mean_cost(sys, w, mu0, out.Ubar_star, out.Vbar_star);

  const MeanGradients g = mean_gradients(sys, w, mu0, out.Ubar_star, out.Vbar_star);
  const double scale = 1.0 + mu0.norm();
  out.grad_norm_u = g.u.norm() / scale;
  out.grad_norm_v = g.v.norm() / scale;
  return out;
}

Vector best_response_controller(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                                const Vector& Vbar) {
  check_mu(sys, mu0, "mu0");
  const MeanBlocks mb = mean_blocks(sys, w);
  return -mb.Huu.llt().solve(mb.Huv * Vbar + mb.BtQA * mu0);
}

Vector best_response_stopper(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                             const Vector& Ubar, double eig_tol) {
  check_mu(sys, mu0, "mu0");
  require_concavity(sys, w, eig_tol);
  const MeanBlocks mb = mean_blocks(sys, w);
  // V̄ = −H_vv⁻¹ (𝒞ᵀQ̄ℬŪ + 𝒞ᵀQ̄𝒜μ₀) with −H_vv ≻ 0.
  return (-mb.Hvv).llt().solve(mb.Huv.transpose() * Ubar + mb.CtQA * mu0);
}

RelativeControllability relative_controllability(const LiftedSystem& sys, const CostWeights& w,
                                                 const Tolerances& tol) {
  require_concavity(sys, w, tol.eig_tol);
  const MeanBlocks mb = mean_blocks(sys, w);
  Eigen::LLT<Matrix> neg_hvv(-mb.Hvv);
  const Matrix CN = sys.Cbar(sys.N);
  // C̄_N H_vv⁻¹ = −C̄_N (−H_vv)⁻¹
  const Matrix CN_Hinv = -neg_hvv.solve(CN.transpose()).transpose();
  RelativeControllability rc;
  rc.G = sys.Bbar(sys.N) - CN_Hinv * mb.Huv.transpose();
  rc.drift_map = sys.Abar(sys.N) - CN_Hinv * (sys.calC.transpose() * w.Qbar * sys.calA);
  const RankInfo ri = numerical_rank(rc.G, tol.rank_tol);
  rc.rank = ri.rank;
  rc.singvals = ri.singular_values;
  return rc;
}

bool check_rank_condition(const RelativeControllability& rc, const Vector& mu0,
                          const Vector& muN, double rank_tol) {
  const Eigen::Index n = rc.G.rows();
  if (mu0.size() != n || muN.size() != n) throw DimensionError("mu0/muN must have length n");
  if (rc.rank == n) return true;
  Matrix aug(n, rc.G.cols() + 1);
  aug << rc.G, muN - rc.drift_map * mu0;
  return numerical_rank(aug, rank_tol).rank == numerical_rank(rc.G, rank_tol).rank;
}

namespace {

// Shared by the exact and least-squares upper games. With keep < n only the
// leading eigenpairs of 𝒢ℛ⁻¹𝒢ᵀ are inverted.
ConstrainedMeanSolution cmsg_solve(const LiftedSystem& sys, const CostWeights& w,
                                   const Vector& mu0, const Vector& muN, const Tolerances& tol,
                                   const RelativeControllability& rc, int keep) {
  const MeanBlocks mb = mean_blocks(sys, w);
  Eigen::LLT<Matrix> neg_hvv(-mb.Hvv);
  if (neg_hvv.info() != Eigen::Success) throw SolverError("H_vv is not negative definite");
  const Matrix Hvv_inv_Hvu = -neg_hvv.solve(mb.Huv.transpose());

  ConstrainedMeanSolution sol;
  sol.scriptR = symmetrize(mb.Huu - mb.Huv * Hvv_inv_Hvu);
  // ℳ = (ℬᵀQ̄𝒞 H_vv⁻¹ 𝒞ᵀ − ℬᵀ) Q̄𝒜μ₀
  sol.scriptM = Hvv_inv_Hvu.transpose() * (mb.CtQA * mu0) - mb.BtQA * mu0;

  Eigen::LLT<Matrix> R_llt(sol.scriptR);
  if (R_llt.info() != Eigen::Success) throw SolverError("ℛ is not positive definite");
  const Matrix Rinv_Gt = R_llt.solve(rc.G.transpose());
  const Matrix gram = symmetrize(rc.G * Rinv_Gt);
  const Vector Rinv_M = R_llt.solve(sol.scriptM);
  const Vector rhs = muN - rc.drift_map * mu0 - rc.G * Rinv_M;

  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const Vector ev = es.eigenvalues();  // ascending
  const Eigen::Index n = ev.size();
  sol.gram_condition = ev(0) > 0.0 ? ev(n - 1) / ev(0) : std::numeric_limits<double>::infinity();
  if (keep == n) {
    if (sol.gram_condition > 1e12) {
      std::ostringstream os;
      os << "𝒢ℛ⁻¹𝒢ᵀ is ill-conditioned (condition number " << sol.gram_condition << ")";
      sol.warnings.push_back(os.str());
    }
    sol.lambda = 2.0 * gram.ldlt().solve(rhs);
  } else {
    const Matrix V = es.eigenvectors().rightCols(keep);
    const Vector inv = ev.tail(keep).cwiseInverse();
    sol.lambda = 2.0 * V * inv.asDiagonal() * V.transpose() * rhs;
  }
  sol.Ubar_c = Rinv_M + Rinv_Gt * (sol.lambda / 2.0);
  sol.Vbar_c = best_response_stopper(sys, w, mu0, sol.Ubar_c, tol.eig_tol);
  const Vector achieved =
      sys.Abar(sys.N) * mu0 + sys.Bbar(sys.N) * sol.Ubar_c + sys.Cbar(sys.N) * sol.Vbar_c;
  sol.terminal_residual = (muN - achieved).norm();
  return sol;
}

}  // namespace

ConstrainedMeanSolution solve_cmsg_upper(const LiftedSystem& sys, const CostWeights& w,
                                         const Vector& mu0, const Vector& muN,
                                         const Tolerances& tol) {
  check_mu(sys, mu0, "mu0");
  check_mu(sys, muN, "muN");
  const RelativeControllability rc = relative_controllability(sys, w, tol);
  if (rc.rank < sys.n) {
    std::ostringstream os;
    os << "relative controllability matrix has rank " << rc.rank << " < n = " << sys.n
       << " (smallest singular value " << rc.singvals(rc.singvals.size() - 1) << ")";
    throw InfeasibleMean(os.str(), rc.rank, sys.n);
  }
  return cmsg_solve(sys, w, mu0, muN, tol, rc, sys.n);
}

ConstrainedMeanSolution solve_cmsg_least_squares(const LiftedSystem& sys, const CostWeights& w,
                                                 const Vector& mu0, const Vector& muN,
                                                 const Tolerances& tol) {
  check_mu(sys, mu0, "mu0");
  check_mu(sys, muN, "muN");
  const RelativeControllability rc = relative_controllability(sys, w, tol);
  if (rc.rank == 0) throw InfeasibleMean("relative controllability matrix is zero", 0, sys.n);
  ConstrainedMeanSolution sol = cmsg_solve(sys, w, mu0, muN, tol, rc, rc.rank);
  if (rc.rank < sys.n) {
    std::ostringstream os;
    os << "terminal mean met only on the " << rc.rank << "-dimensional reachable subspace";
    sol.warnings.push_back(os.str());
  }
  return sol;
}

}  // namespace steergame
