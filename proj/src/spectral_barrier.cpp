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

#include "steergame/spectral_barrier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "steergame/errors.hpp"

namespace steergame {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Newton decrement (halved) at which a centering pass stops.
constexpr double kCenterTol = 1e-10;
constexpr double kMinStep = 1e-12;
// Below this squared decrement a self-concordant function accepts the full
// Newton step, so the Armijo test (which rounding can defeat at large t) is
// skipped.
constexpr double kQuadraticRegion = 0.04;

// Value, gradient and Hessian of φ(x, τ) = −log det(τI − W(x)W(x)ᵀ).
struct BarrierEval {
  bool inside = false;
  double value = kInf;
  Vector gx;
  double gtau = 0.0;
  Matrix hxx;
  Vector hxtau;
  double htautau = 0.0;
};

bool barrier_value(const RankOneAffineMap& map, const Vector& x, double tau, double* value) {
  const Matrix W = map.eval(x);
  const Eigen::Index n = W.rows();
  const Matrix M = tau * Matrix::Identity(n, n) - W * W.transpose();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) return false;
  const Vector d = Matrix(llt.matrixL()).diagonal();
  if ((d.array() <= 0.0).any()) return false;
  *value = -2.0 * d.array().log().sum();
  return std::isfinite(*value);
}

BarrierEval barrier_eval(const RankOneAffineMap& map, const Vector& x, double tau,
                         bool with_tau) {
  BarrierEval ev;
  const Matrix W = map.eval(x);
  const Eigen::Index n = W.rows();
  const Matrix M = tau * Matrix::Identity(n, n) - W * W.transpose();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) return ev;
  const Vector d = Matrix(llt.matrixL()).diagonal();
  if ((d.array() <= 0.0).any()) return ev;
  ev.inside = true;
  ev.value = -2.0 * d.array().log().sum();
  const Matrix Z = symmetrize(llt.solve(Matrix::Identity(n, n)));

  const Matrix ZU = Z * map.U;      // n x p
  const Matrix WS = W * map.S;      // n x p, column i = W s_i
  const Matrix ZWS = Z * WS;        // n x p
  ev.gx = 2.0 * (ZU.cwiseProduct(WS)).colwise().sum().transpose();

  const Matrix Uz = map.U.transpose() * ZU;          // u_iᵀ Z u_j
  const Matrix Ss = map.S.transpose() * map.S;       // s_iᵀ s_j
  const Matrix T = WS.transpose() * ZWS;             // s_iᵀ WᵀZW s_j
  const Matrix Pm = WS.transpose() * ZU;             // s_iᵀ WᵀZ u_j
  ev.hxx = 2.0 * (Uz.cwiseProduct(Ss + T) + Pm.cwiseProduct(Pm.transpose()));
  ev.hxx = symmetrize(ev.hxx);

  if (with_tau) {
    ev.gtau = -Z.trace();
    ev.htautau = (Z * Z).trace();
    const Matrix Z2WS = Z * ZWS;
    ev.hxtau = -2.0 * (map.U.cwiseProduct(Z2WS)).colwise().sum().transpose();
  }
  return ev;
}

double barrier_nu(const RankOneAffineMap& map) {
  return 2.0 * static_cast<double>(std::min(map.W0.rows(), map.W0.cols()));
}

}  // namespace

NormMinResult minimize_spectral_norm(const RankOneAffineMap& map, const Vector& x_start,
                                     double stop_below, const BarrierOptions& opts) {
  const Eigen::Index p = map.params();
  if (x_start.size() != p) throw DimensionError("start point has wrong length");
  // Proximal weight keeps the Newton system definite along directions the
  // map ignores.
  const double rho = 1e-10;
  const double nu = static_cast<double>(map.W0.rows() + map.W0.cols());

  Vector x = x_start;
  const double s0 = spectral_norm(map.eval(x));
  double tau = 1.25 * s0 * s0 + 1e-8;

  auto objective = [&](const Vector& xx, double tt) {
    return tt + 0.5 * rho * (xx - x_start).squaredNorm();
  };

  NormMinResult res;
  double t = nu / std::max(tau, 1e-12);
  int steps = 0;
  for (;;) {
    // Centering.
    for (;;) {
      const BarrierEval ev = barrier_eval(map, x, tau, true);
      if (!ev.inside) throw SolverError("norm minimization left the barrier domain");
      Matrix H(p + 1, p + 1);
      H.topLeftCorner(p, p) = ev.hxx;
      H.topLeftCorner(p, p).diagonal().array() += t * rho;
      H.topRightCorner(p, 1) = ev.hxtau;
      H.bottomLeftCorner(1, p) = ev.hxtau.transpose();
      H(p, p) = ev.htautau;
      Vector g(p + 1);
      g.head(p) = t * rho * (x - x_start) + ev.gx;
      g(p) = t + ev.gtau;
      const Vector dz = -H.ldlt().solve(g);
      const double dec = -g.dot(dz);
      if (!(dec >= 0.0) || !std::isfinite(dec)) throw SolverError("norm minimization: bad Newton step");
      if (dec / 2.0 <= kCenterTol) break;
      const double f0 = t * objective(x, tau) + ev.value;
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Vector xn = x + alpha * dz.head(p);
        const double taun = tau + alpha * dz(p);
        double bv = 0.0;
        if (!barrier_value(map, xn, taun, &bv)) continue;
        if (dec < kQuadraticRegion) break;
        if (t * objective(xn, taun) + bv <= f0 - 0.25 * alpha * dec) break;
      }
      if (alpha < kMinStep) break;
      x += alpha * dz.head(p);
      tau += alpha * dz(p);
      if (++steps > opts.max_newton) throw SolverError("norm minimization: Newton budget exhausted");
      if (stop_below > 0.0 && tau < stop_below * stop_below) {
        res.x = x;
        res.norm = spectral_norm(map.eval(x));
        res.bound = std::sqrt(tau);
        res.gap = nu / t;
        res.stopped_early = true;
        return res;
      }
    }
    if (nu / t <= opts.gap_tol * std::max(1.0, tau)) break;
    t *= opts.growth;
  }
  res.x = x;
  res.norm = spectral_norm(map.eval(x));
  res.bound = std::sqrt(tau);
  res.gap = nu / t;
  return res;
}

SpectralQpResult solve_spectral_qp(const Matrix& P, const Vector& q, const RankOneAffineMap& map,
                                   const Vector& x_start, double feas_tol,
                                   const BarrierOptions& opts) {
  const Eigen::Index p = map.params();
  if (P.rows() != p || P.cols() != p || q.size() != p || x_start.size() != p) {
    throw DimensionError("spectral QP: sizes do not match the constraint map");
  }
  auto objective = [&](const Vector& xx) { return 0.5 * xx.dot(P * xx) + q.dot(xx); };

  Eigen::LLT<Matrix> P_llt(P);
  if (P_llt.info() != Eigen::Success) throw SolverError("spectral QP: objective is not strictly convex");
  const Vector x_free = -P_llt.solve(q);
  SpectralQpResult res;
  const double free_norm = spectral_norm(map.eval(x_free));
  if (free_norm <= 1.0) {
    res.x = x_free;
    res.objective = objective(x_free);
    res.norm = free_norm;
    return res;
  }
  res.constraint_active = true;

  // Strictly feasible start.
  Vector x = x_start;
  double start_norm = spectral_norm(map.eval(x));
  if (!(start_norm < 1.0 - 1e-12)) {
    const NormMinResult nm = minimize_spectral_norm(map, x_start, 1.0, opts);
    if (!nm.stopped_early) {
      if (nm.norm > 1.0 + feas_tol) {
        std::ostringstream os;
        os << "terminal covariance bound is unattainable: smallest constraint norm is " << nm.norm;
        throw InfeasibleCovariance(os.str(), nm.norm);
      }
      // Feasible only up to the tolerance; no interior to follow.
      res.x = nm.x;
      res.objective = objective(nm.x);
      res.norm = nm.norm;
      res.gap = kInf;
      return res;
    }
    x = nm.x;
    start_norm = nm.norm;
  }

  const double nu = barrier_nu(map);
  const double f_lower = objective(x_free);
  double t = nu / std::max(objective(x) - f_lower, 1e-12);
  int steps = 0;
  for (;;) {
    for (;;) {
      const BarrierEval ev = barrier_eval(map, x, 1.0, false);
      if (!ev.inside) throw SolverError("spectral QP left the barrier domain");
      const Vector g = t * (P * x + q) + ev.gx;
      const Matrix H = t * P + ev.hxx;
      const Vector dx = -H.ldlt().solve(g);
      const double dec = -g.dot(dx);
      if (!(dec >= 0.0) || !std::isfinite(dec)) throw SolverError("spectral QP: bad Newton step");
      if (dec / 2.0 <= kCenterTol) break;
      const double f0 = t * objective(x) + ev.value;
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Vector xn = x + alpha * dx;
        double bv = 0.0;
        if (!barrier_value(map, xn, 1.0, &bv)) continue;
        if (dec < kQuadraticRegion) break;
        if (t * objective(xn) + bv <= f0 - 0.25 * alpha * dec) break;
      }
      if (alpha < kMinStep) break;
      x += alpha * dx;
      if (++steps > opts.max_newton) throw SolverError("spectral QP: Newton budget exhausted");
    }
    res.newton_steps = steps;
    if (nu / t <= opts.gap_tol * std::max(1.0, std::abs(objective(x)))) break;
    t *= opts.growth;
  }
  res.x = x;
  res.objective = objective(x);
  res.norm = spectral_norm(map.eval(x));
  res.gap = nu / t;
  return res;
}

}  // namespace steergame
