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

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "steergame/cov_game.hpp"
#include "steergame/mean_game.hpp"
#include "steergame/model.hpp"
#include "steergame/scenario.hpp"

namespace fx {

using steergame::Matrix;
using steergame::Vector;

struct Instance {
  steergame::StageSystem sys;
  steergame::StageWeights w;
  steergame::GaussianBoundary b;

  steergame::LiftedSystem lifted() const { return steergame::lift(sys); }
  steergame::CostWeights weights() const { return steergame::lift_weights(w); }
};

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// n = m = l = r = 1, N = 2, A = B = C = 1, Q = 1, R = 2, S = 4, mu0 = 1, Sigma0 = 1.
inline Instance scalar_instance(double d = 0.0, double muN = 0.3, double SigmaN = 1.0) {
  auto sys = steergame::StageSystem::time_invariant(scalar(1), scalar(1), scalar(1), scalar(d), 2);
  auto w = steergame::StageWeights::time_invariant(scalar(1), scalar(2), scalar(4), 2);
  auto b = steergame::make_boundary(Vector::Constant(1, 1.0), scalar(1), Vector::Constant(1, muN),
                                    scalar(SigmaN));
  return {sys, w, b};
}

inline std::string scenario_path(const std::string& name) {
  return std::string(STEERGAME_SOURCE_DIR) + "/scenarios/" + name + ".yaml";
}

inline steergame::Scenario load(const std::string& name) {
  return steergame::parse_scenario(scenario_path(name));
}

inline Matrix randn(std::mt19937_64& g, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(g);
  return m;
}

inline Vector randv(std::mt19937_64& g, int n, double scale = 1.0) {
  return randn(g, n, 1, scale);
}

inline Matrix rand_spd(std::mt19937_64& g, int n, double shift) {
  const Matrix G = randn(g, n, n);
  return G * G.transpose() / n + shift * Matrix::Identity(n, n);
}

// Random time-varying instance with S large enough that the stopper's mean
// problem is strictly concave.
inline Instance random_instance(std::mt19937_64& g, int max_n = 4, int max_N = 8) {
  std::uniform_int_distribution<int> dn(1, max_n), dc(1, 3), dN(1, max_N);
  const int n = dn(g), m = dc(g), l = dc(g), r = dn(g), N = dN(g);
  std::vector<Matrix> A, B, C, D;
  for (int k = 0; k < N; ++k) {
    A.push_back(Matrix::Identity(n, n) + randn(g, n, n, 0.3));
    B.push_back(randn(g, n, m));
    C.push_back(randn(g, n, l));
    D.push_back(randn(g, n, r, 0.2));
  }
  steergame::StageSystem sys(A, B, C, D);
  steergame::StageWeights w;
  for (int k = 0; k <= N; ++k) w.Q.push_back(rand_spd(g, n, 0.1));
  for (int k = 0; k < N; ++k) w.R.push_back(rand_spd(g, m, 0.5));
  // S = s I with s above the largest eigenvalue of 𝒞ᵀQ̄𝒞.
  w.S.assign(N, Matrix::Identity(l, l));
  const auto lifted = steergame::lift(sys);
  const auto cw = steergame::lift_weights(w);
  const double top = steergame::max_eigenvalue(lifted.calC.transpose() * cw.Qbar * lifted.calC);
  std::uniform_real_distribution<double> extra(0.5, 5.0);
  const double s = top + extra(g);
  for (auto& Sk : w.S) Sk *= s;
  const Matrix S0 = rand_spd(g, n, 0.05);
  const Matrix SN = rand_spd(g, n, 0.05);
  auto b = steergame::make_boundary(randv(g, n), S0, randv(g, n), SN);
  return {sys, w, b};
}

using Objective = std::function<double(const Vector&)>;

inline Vector fd_gradient(const Objective& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_hessian(const Objective& f, const Vector& x, double h) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      auto at = [&](double a, double b) {
        Vector y = x;
        y(i) += a;
        y(j) += b;
        return f(y);
      };
      H(i, j) = H(j, i) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    }
  }
  return H;
}

// Damped Newton on finite-difference derivatives.
inline Vector minimize_newton(const Objective& f, Vector x, double h = 1e-4, int iters = 200) {
  for (int it = 0; it < iters; ++it) {
    const Vector g = fd_gradient(f, x, h);
    Matrix H = fd_hessian(f, x, h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
    const double floor = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const Vector ev = es.eigenvalues().cwiseMax(floor);
    const Vector step = -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(ev);
    double t = 1.0;
    const double f0 = f(x);
    while (t > 1e-14 && f(x + t * step) > f0 + 1e-4 * t * g.dot(step)) t *= 0.5;
    x += t * step;
    if ((t * step).norm() < 1e-13 * (1.0 + x.norm())) break;
  }
  return x;
}

// BFGS with backtracking on central-difference gradients.
inline Vector minimize_bfgs(const Objective& f, Vector x, double gtol = 1e-11, double h = 1e-4,
                            int iters = 1000) {
  const Eigen::Index n = x.size();
  Matrix Hinv = Matrix::Identity(n, n);
  Vector g = fd_gradient(f, x, h);
  for (int it = 0; it < iters && g.norm() > gtol; ++it) {
    const Vector p = -Hinv * g;
    double t = 1.0;
    const double f0 = f(x);
    while (t > 1e-16 && f(x + t * p) > f0 + 1e-4 * t * g.dot(p)) t *= 0.5;
    const Vector s = t * p;
    x += s;
    const Vector g_new = fd_gradient(f, x, h);
    const Vector y = g_new - g;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const Matrix I = Matrix::Identity(n, n);
      const Matrix V = I - (s * y.transpose()) / sy;
      Hinv = V * Hinv * V.transpose() + (s * s.transpose()) / sy;
    }
    if (s.norm() < 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace fx
