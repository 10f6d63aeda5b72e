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

#include "steergame/model.hpp"

#include <sstream>
#include <string>

#include "steergame/errors.hpp"
#include "steergame/gain.hpp"

namespace steergame {
namespace {

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name,
                 int k) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "stage " << k << ": " << name << " is " << m.rows() << "x" << m.cols()
       << ", expected " << rows << "x" << cols;
    throw DimensionError(os.str());
  }
}

}  // namespace

StageSystem::StageSystem(std::vector<Matrix> A, std::vector<Matrix> B, std::vector<Matrix> C,
                         std::vector<Matrix> D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const std::size_t N = A_.size();
  if (N == 0) throw DimensionError("horizon must be at least 1");
  if (B_.size() != N || C_.size() != N || D_.size() != N) {
    throw DimensionError("A, B, C, D sequences must all have length N");
  }
  const Eigen::Index n = A_[0].rows();
  const Eigen::Index m = B_[0].cols(), l = C_[0].cols(), r = D_[0].cols();
  if (n < 1 || m < 1 || l < 1 || r < 1) throw DimensionError("n, m, l, r must be >= 1");
  for (std::size_t k = 0; k < N; ++k) {
    const int kk = static_cast<int>(k);
    check_shape(A_[k], n, n, "A", kk);
    check_shape(B_[k], n, m, "B", kk);
    check_shape(C_[k], n, l, "C", kk);
    check_shape(D_[k], n, r, "D", kk);
  }
}

StageSystem StageSystem::time_invariant(const Matrix& A, const Matrix& B, const Matrix& C,
                                        const Matrix& D, int horizon) {
  if (horizon < 1) throw DimensionError("horizon must be at least 1");
  const auto N = static_cast<std::size_t>(horizon);
  return StageSystem(std::vector<Matrix>(N, A), std::vector<Matrix>(N, B),
                     std::vector<Matrix>(N, C), std::vector<Matrix>(N, D));
}

Vector StageSystem::propagate(const Vector& x0, const Vector& U, const Vector& V,
                              const Vector& W) const {
  const int N = horizon(), nn = n(), mm = m(), ll = l(), rr = r();
  if (x0.size() != nn || U.size() != N * mm || V.size() != N * ll || W.size() != N * rr) {
    throw DimensionError("propagate: input sizes do not match the system");
  }
  Vector X(static_cast<Eigen::Index>(N + 1) * nn);
  X.head(nn) = x0;
  for (int k = 0; k < N; ++k) {
    X.segment((k + 1) * nn, nn) = A_[k] * X.segment(k * nn, nn) + B_[k] * U.segment(k * mm, mm) +
                                  C_[k] * V.segment(k * ll, ll) + D_[k] * W.segment(k * rr, rr);
  }
  return X;
}

Matrix LiftedSystem::selector(int k) const {
  Matrix E = Matrix::Zero(n, (N + 1) * n);
  E.block(0, k * n, n, n).setIdentity();
  return E;
}

Vector LiftedSystem::propagate(const Vector& x0, const Vector& U, const Vector& V,
                               const Vector& W) const {
  return calA * x0 + calB * U + calC * V + calD * W;
}

LiftedSystem lift(const StageSystem& sys) {
  LiftedSystem ls;
  ls.N = sys.horizon();
  ls.n = sys.n();
  ls.m = sys.m();
  ls.l = sys.l();
  ls.r = sys.r();
  const int N = ls.N, n = ls.n;
  const Eigen::Index rows = static_cast<Eigen::Index>(N + 1) * n;
  ls.calA = Matrix::Zero(rows, n);
  ls.calB = Matrix::Zero(rows, N * ls.m);
  ls.calC = Matrix::Zero(rows, N * ls.l);
  ls.calD = Matrix::Zero(rows, N * ls.r);
  ls.calA.topRows(n).setIdentity();
  // Block row k+1 = A_k * (block row k) with the stage-k input blocks appended.
  for (int k = 0; k < N; ++k) {
    const Matrix& Ak = sys.A(k);
    ls.calA.middleRows((k + 1) * n, n) = Ak * ls.calA.middleRows(k * n, n);
    ls.calB.middleRows((k + 1) * n, n) = Ak * ls.calB.middleRows(k * n, n);
    ls.calC.middleRows((k + 1) * n, n) = Ak * ls.calC.middleRows(k * n, n);
    ls.calD.middleRows((k + 1) * n, n) = Ak * ls.calD.middleRows(k * n, n);
    ls.calB.block((k + 1) * n, k * ls.m, n, ls.m) = sys.B(k);
    ls.calC.block((k + 1) * n, k * ls.l, n, ls.l) = sys.C(k);
    ls.calD.block((k + 1) * n, k * ls.r, n, ls.r) = sys.D(k);
  }
  ls.E0 = ls.selector(0);
  ls.EN = ls.selector(N);
  return ls;
}

StageWeights StageWeights::time_invariant(const Matrix& Q, const Matrix& R, const Matrix& S,
                                          int horizon) {
  const auto N = static_cast<std::size_t>(horizon);
  return {std::vector<Matrix>(N + 1, Q), std::vector<Matrix>(N, R), std::vector<Matrix>(N, S)};
}

CostWeights lift_weights(const StageWeights& w, double eig_tol) {
  const std::size_t N = w.R.size();
  if (N == 0 || w.S.size() != N || w.Q.size() != N + 1) {
    throw DimensionError("weights need N+1 Q blocks and N R and S blocks");
  }
  const Eigen::Index n = w.Q[0].rows();
  const Eigen::Index m = w.R[0].rows();
  const Eigen::Index l = w.S[0].rows();
  CostWeights cw;
  cw.stages = w;
  for (std::size_t k = 0; k <= N; ++k) {
    const int kk = static_cast<int>(k);
    check_shape(w.Q[k], n, n, "Q", kk);
    if (k == N) {
      cw.stages.Q[k] = Matrix::Zero(n, n);
      continue;
    }
    check_shape(w.R[k], m, m, "R", kk);
    check_shape(w.S[k], l, l, "S", kk);
    if (relative_asymmetry(w.Q[k]) > 1e-12 || relative_asymmetry(w.R[k]) > 1e-12 ||
        relative_asymmetry(w.S[k]) > 1e-12) {
      throw DefinitenessError("stage " + std::to_string(k) + ": weights must be symmetric", 0.0);
    }
    cw.stages.Q[k] = symmetrize(w.Q[k]);
    cw.stages.R[k] = symmetrize(w.R[k]);
    cw.stages.S[k] = symmetrize(w.S[k]);
    const double qmin = min_eigenvalue(cw.stages.Q[k]);
    if (qmin < -eig_tol) {
      throw DefinitenessError("stage " + std::to_string(k) + ": Q is not positive semidefinite",
                              qmin);
    }
    const double rmin = min_eigenvalue(cw.stages.R[k]);
    if (rmin <= eig_tol) {
      throw DefinitenessError("stage " + std::to_string(k) + ": R is not positive definite", rmin);
    }
    const double smin = min_eigenvalue(cw.stages.S[k]);
    if (smin <= eig_tol) {
      throw DefinitenessError("stage " + std::to_string(k) + ": S is not positive definite", smin);
    }
  }
  cw.Qbar = blkdiag(cw.stages.Q);
  cw.Rbar = blkdiag(cw.stages.R);
  cw.Sbar = blkdiag(cw.stages.S);
  return cw;
}

GaussianBoundary make_boundary(Vector mu0, Matrix Sigma0, Vector muN, Matrix SigmaN,
                               double eig_tol) {
  const Eigen::Index n = mu0.size();
  if (n < 1 || muN.size() != n || Sigma0.rows() != n || Sigma0.cols() != n ||
      SigmaN.rows() != n || SigmaN.cols() != n) {
    throw DimensionError("boundary: mu0, Sigma0, muN, SigmaN must share dimension n");
  }
  if (relative_asymmetry(Sigma0) > 1e-12) throw DefinitenessError("Sigma0 is not symmetric", 0.0);
  if (relative_asymmetry(SigmaN) > 1e-12) throw DefinitenessError("SigmaN is not symmetric", 0.0);
  GaussianBoundary b{std::move(mu0), symmetrize(Sigma0), std::move(muN), symmetrize(SigmaN)};
  const double smin = min_eigenvalue(b.Sigma0);
  if (smin < -eig_tol) throw DefinitenessError("Sigma0 is not positive semidefinite", smin);
  return b;
}

MeanTrajectory mean_trajectory(const LiftedSystem& sys, const Vector& mu0, const Vector& Ubar,
                               const Vector& Vbar) {
  if (mu0.size() != sys.n || Ubar.size() != sys.N * sys.m || Vbar.size() != sys.N * sys.l) {
    throw DimensionError("mean_trajectory: input sizes do not match the system");
  }
  return {sys.calA * mu0 + sys.calB * Ubar + sys.calC * Vbar, Ubar, Vbar};
}

double mean_cost(const LiftedSystem& sys, const CostWeights& w, const Vector& mu0,
                 const Vector& Ubar, const Vector& Vbar) {
  const Vector X = mean_trajectory(sys, mu0, Ubar, Vbar).Xbar;
  return X.dot(w.Qbar * X) + Ubar.dot(w.Rbar * Ubar) - Vbar.dot(w.Sbar * Vbar);
}

PayoffBreakdown payoff(const LiftedSystem& sys, const CostWeights& w, const GaussianBoundary& b,
                       const Vector& Ubar, const Vector& Vbar, const GainProfile& K,
                       const GainProfile& L) {
  if (K.horizon() != sys.N || K.rows() != sys.m || K.n() != sys.n || L.horizon() != sys.N ||
      L.rows() != sys.l || L.n() != sys.n) {
    throw DimensionError("payoff: gain shapes do not match the system");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(sys.N + 1) * sys.n;
  const Matrix Kl = K.lifted();
  const Matrix Ll = L.lifted();
  const Matrix Sigma_s =
      sys.calA * b.Sigma0 * sys.calA.transpose() + sys.calD * sys.calD.transpose();
  const Matrix closed = Matrix::Identity(dim, dim) + sys.calB * Kl + sys.calC * Ll;

  const Vector Xbar = mean_trajectory(sys, b.mu0, Ubar, Vbar).Xbar;
  const Matrix XXt = Xbar * Xbar.transpose() + closed * Sigma_s * closed.transpose();
  const Matrix UUt = Ubar * Ubar.transpose() + Kl * Sigma_s * Kl.transpose();
  const Matrix VVt = Vbar * Vbar.transpose() + Ll * Sigma_s * Ll.transpose();

  PayoffBreakdown out;
  out.total = (w.Qbar * XXt).trace() + (w.Rbar * UUt).trace() - (w.Sbar * VVt).trace();
  out.mean = Xbar.dot(w.Qbar * Xbar) + Ubar.dot(w.Rbar * Ubar) - Vbar.dot(w.Sbar * Vbar);
  out.cov = ((closed.transpose() * w.Qbar * closed + Kl.transpose() * w.Rbar * Kl -
              Ll.transpose() * w.Sbar * Ll) *
             Sigma_s)
                .trace();
  return out;
}

}  // namespace steergame
