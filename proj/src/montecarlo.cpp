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

#include "steergame/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "steergame/errors.hpp"

namespace steergame {
namespace {

void check_inputs(const StageSystem& sys, const GaussianBoundary& b, const Vector& Ubar,
                  const Vector& Vbar, const GainProfile& K, const GainProfile& L, int samples) {
  const int N = sys.horizon(), n = sys.n();
  if (samples < 1) throw DimensionError("rollout: samples must be at least 1");
  if (b.mu0.size() != n || b.Sigma0.rows() != n || b.Sigma0.cols() != n) {
    throw DimensionError("rollout: boundary does not match state dimension");
  }
  if (Ubar.size() != N * sys.m() || Vbar.size() != N * sys.l()) {
    throw DimensionError("rollout: mean control length does not match the system");
  }
  if (K.horizon() != N || K.rows() != sys.m() || K.n() != n || L.horizon() != N ||
      L.rows() != sys.l() || L.n() != n) {
    throw DimensionError("rollout: gain shapes do not match the system");
  }
}

}  // namespace

RolloutBatch rollout(const StageSystem& sys, const GaussianBoundary& boundary, const Vector& Ubar,
                     const Vector& Vbar, const GainProfile& K, const GainProfile& L, int samples,
                     std::uint64_t seed, const RolloutOptions& opts) {
  check_inputs(sys, boundary, Ubar, Vbar, K, L, samples);
  const int N = sys.horizon(), n = sys.n(), m = sys.m(), l = sys.l();
  const Matrix F = psd_factor(boundary.Sigma0);  // throws on an indefinite Sigma0

  RolloutBatch out;
  out.samples = samples;
  out.seed = seed;
  out.N = N;
  out.n = n;
  out.m = m;
  out.l = l;
  out.states.resize(samples, (N + 1) * n);
  out.aux_y.resize(samples, (N + 1) * n);
  out.controls_u.resize(samples, N * m);
  out.controls_v.resize(samples, N * l);

  auto work = [&](int begin, int end) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z0(n);
    for (int i = begin; i < end; ++i) {
      std::mt19937_64 gen(seed ^ static_cast<std::uint64_t>(i));
      normal.reset();
      for (int j = 0; j < n; ++j) z0(j) = normal(gen);
      Vector y = F * z0;
      Vector x = boundary.mu0 + y;
      for (int k = 0; k < N; ++k) {
        out.states.row(i).segment(k * n, n) = x.transpose();
        out.aux_y.row(i).segment(k * n, n) = y.transpose();
        const Vector u = Ubar.segment(k * m, m) + K.block(k) * y;
        const Vector v = Vbar.segment(k * l, l) + L.block(k) * y;
        out.controls_u.row(i).segment(k * m, m) = u.transpose();
        out.controls_v.row(i).segment(k * l, l) = v.transpose();
        // w_k is drawn after x_k is fixed.
        Vector w(sys.r());
        for (int j = 0; j < sys.r(); ++j) w(j) = normal(gen);
        const Vector dw = sys.D(k) * w;
        x = sys.A(k) * x + sys.B(k) * u + sys.C(k) * v + dw;
        y = sys.A(k) * y + dw;
      }
      out.states.row(i).segment(N * n, n) = x.transpose();
      out.aux_y.row(i).segment(N * n, n) = y.transpose();
    }
  };

  int threads = opts.threads > 0 ? opts.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::clamp(threads, 1, std::max(1, samples / 256));
  if (threads == 1) {
    work(0, samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk, e = std::min(samples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

EmpiricalMoments empirical_moments(const RolloutBatch& batch, const CostWeights* weights) {
  if (batch.samples < 2) throw DimensionError("empirical_moments: need at least 2 samples");
  const int S = batch.samples, N = batch.N, n = batch.n;
  const double s = static_cast<double>(S);
  EmpiricalMoments out;
  for (int k = 0; k <= N; ++k) {
    const Matrix X = batch.states.middleCols(k * n, n);
    const Vector mean = X.colwise().mean().transpose();
    const Matrix Xc = X.rowwise() - mean.transpose();
    const Matrix cov = symmetrize(Xc.transpose() * Xc / (s - 1.0));

    // Standard error of each covariance entry from the spread of the centered products.
    Matrix cov_se(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const Vector prod = Xc.col(a).cwiseProduct(Xc.col(b));
        const double pm = prod.mean();
        const double var = (prod.array() - pm).square().sum() / (s - 1.0);
        cov_se(a, b) = cov_se(b, a) = std::sqrt(var / s);
      }
    }
    out.mean_k.push_back(mean);
    out.cov_k.push_back(cov);
    out.mean_stderr_k.push_back((cov.diagonal() / s).cwiseSqrt());
    out.cov_stderr_k.push_back(cov_se);
  }

  if (weights != nullptr) {
    const auto& st = weights->stages;
    if (static_cast<int>(st.R.size()) != N) {
      throw DimensionError("empirical_moments: weights horizon does not match the batch");
    }
    const int m = batch.m, l = batch.l;
    Vector cost(S);
    for (int i = 0; i < S; ++i) {
      double c = 0.0;
      for (int k = 0; k < N; ++k) {
        const Vector x = batch.states.row(i).segment(k * n, n).transpose();
        const Vector u = batch.controls_u.row(i).segment(k * m, m).transpose();
        const Vector v = batch.controls_v.row(i).segment(k * l, l).transpose();
        c += x.dot(st.Q[k] * x) + u.dot(st.R[k] * u) - v.dot(st.S[k] * v);
      }
      cost(i) = c;
    }
    const double mean = cost.mean();
    const double var = (cost.array() - mean).square().sum() / (s - 1.0);
    out.cost_estimate = mean;
    out.cost_stderr = std::sqrt(var / s);
  }
  return out;
}

std::vector<Eigen::Vector2d> ellipse_points(const Vector& mean, const Matrix& cov,
                                            std::pair<int, int> dims, double nsigma,
                                            int npoints) {
  const auto [i, j] = dims;
  if (i < 0 || j < 0 || i >= cov.rows() || j >= cov.rows() || i == j ||
      mean.size() != cov.rows()) {
    throw DimensionError("ellipse_points: invalid dimension pair");
  }
  if (npoints < 1) throw DimensionError("ellipse_points: npoints must be positive");
  Eigen::Matrix2d sub;
  sub << cov(i, i), cov(i, j), cov(j, i), cov(j, j);
  sub = 0.5 * (sub + sub.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sub);
  Eigen::Vector2d ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-10 * scale) {
    std::ostringstream os;
    os << "ellipse_points: marginal covariance is not PSD (min eigenvalue " << ev.minCoeff()
       << ")";
    throw DefinitenessError(os.str(), ev.minCoeff());
  }
  ev = ev.cwiseMax(0.0);
  const Eigen::Matrix2d T = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * nsigma;
  const Eigen::Vector2d c(mean(i), mean(j));
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(npoints);
  for (int p = 0; p < npoints; ++p) {
    const double th = 2.0 * std::numbers::pi * p / npoints;
    pts.push_back(c + T * Eigen::Vector2d(std::cos(th), std::sin(th)));
  }
  return pts;
}

}  // namespace steergame
