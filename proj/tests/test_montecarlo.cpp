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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "steergame/errors.hpp"
#include "steergame/montecarlo.hpp"

using namespace steergame;
using fx::scalar;

TEST(Rollout, DeterministicSystemGivesIdenticalTrajectories) {
  auto in = fx::scalar_instance(0.0);
  in.b = make_boundary(Vector::Constant(1, 1.0), scalar(0), Vector::Constant(1, 0.3), scalar(1));
  const Vector U = Vector::Constant(2, -0.2), V = Vector::Constant(2, 0.1);
  const GainProfile K(std::vector<Matrix>{scalar(-0.5), scalar(-0.5)});
  const GainProfile L(std::vector<Matrix>{scalar(0.1), scalar(0.1)});
  const auto batch = rollout(in.sys, in.b, U, V, K, L, 50, 1);
  const Vector x = in.lifted().propagate(in.b.mu0, U, V, Vector::Zero(2));
  for (int i = 0; i < 50; ++i) EXPECT_LT((batch.states.row(i).transpose() - x).norm(), 1e-15);
  const auto mom = empirical_moments(batch);
  for (const auto& c : mom.cov_k) EXPECT_LT(c.norm(), 1e-28);
}

TEST(Rollout, ControlsFollowFeedbackOnDeviation) {
  std::mt19937_64 g(51);
  const auto in = fx::random_instance(g, 3, 4);
  const auto sys = in.lifted();
  const Vector U = fx::randv(g, sys.N * sys.m), V = fx::randv(g, sys.N * sys.l);
  const GainProfile K = GainProfile::from_free(fx::randv(g, sys.N * sys.m * sys.n, 0.2), sys.N, sys.m, sys.n);
  const GainProfile L = GainProfile::from_free(fx::randv(g, sys.N * sys.l * sys.n, 0.2), sys.N, sys.l, sys.n);
  const auto batch = rollout(in.sys, in.b, U, V, K, L, 20, 3);
  for (int i = 0; i < 20; ++i) {
    // y_0 = x_0 − mu0, y_{k+1} = A_k y_k + D_k w_k
    EXPECT_LT((batch.aux_y.row(i).head(sys.n).transpose() - (batch.state(i, 0) - in.b.mu0)).norm(), 1e-12);
    for (int k = 0; k < sys.N; ++k) {
      const Vector y = batch.aux_y.row(i).segment(k * sys.n, sys.n).transpose();
      const Vector u = batch.controls_u.row(i).segment(k * sys.m, sys.m).transpose();
      const Vector v = batch.controls_v.row(i).segment(k * sys.l, sys.l).transpose();
      EXPECT_LT((u - U.segment(k * sys.m, sys.m) - K.block(k) * y).norm(), 1e-12);
      EXPECT_LT((v - V.segment(k * sys.l, sys.l) - L.block(k) * y).norm(), 1e-12);
      const Vector x1 = in.sys.A(k) * batch.state(i, k) + in.sys.B(k) * u + in.sys.C(k) * v;
      // The noise term is the only difference, and it also drives y.
      const Vector dy = batch.aux_y.row(i).segment((k + 1) * sys.n, sys.n).transpose() - in.sys.A(k) * y;
      EXPECT_LT((batch.state(i, k + 1) - x1 - dy).norm(), 1e-12);
    }
  }
}

TEST(Rollout, SeedAndThreadDeterminism) {
  const auto in = fx::scalar_instance(0.3);
  const Vector z = Vector::Zero(2);
  const GainProfile K = GainProfile::zeros(2, 1, 1), L = GainProfile::zeros(2, 1, 1);
  const auto a = rollout(in.sys, in.b, z, z, K, L, 3000, 9, {1});
  const auto b = rollout(in.sys, in.b, z, z, K, L, 3000, 9, {4});
  const auto c = rollout(in.sys, in.b, z, z, K, L, 3000, 10, {1});
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states, c.states);
}

TEST(Moments, ScalarTerminalVarianceMatchesPropagation) {
  // x1 = x0 + w0, x2 = x1 + w1 with Σ0 = 1 and d = 0.5: Var(x2) = 1.5.
  const auto in = fx::scalar_instance(0.5);
  const Vector z = Vector::Zero(2);
  const GainProfile K = GainProfile::zeros(2, 1, 1), L = GainProfile::zeros(2, 1, 1);
  const auto batch = rollout(in.sys, in.b, z, z, K, L, 1000000, 2);
  const auto mom = empirical_moments(batch);
  EXPECT_LT(std::abs(mom.cov_k[2](0, 0) - 1.5), 3.0 * mom.cov_stderr_k[2](0, 0));
  EXPECT_LT(std::abs(mom.mean_k[2](0) - 1.0), 3.0 * mom.mean_stderr_k[2](0));
  EXPECT_NEAR(mom.cov_stderr_k[2](0, 0), 1.5 * std::sqrt(2.0 / 1e6), 1e-4);
}

TEST(Moments, CostEstimateMatchesPayoff) {
  const auto in = fx::scalar_instance(0.5);
  const auto sys = in.lifted();
  const auto w = in.weights();
  const Vector U = Vector::Constant(2, -0.3), V = Vector::Constant(2, 0.1);
  const GainProfile K(std::vector<Matrix>{scalar(-0.5), scalar(-0.3)});
  const GainProfile L(std::vector<Matrix>{scalar(0.1), scalar(0.05)});
  const double J = payoff(sys, w, in.b, U, V, K, L).total;
  const auto mom = empirical_moments(rollout(in.sys, in.b, U, V, K, L, 400000, 4), &w);
  EXPECT_LT(std::abs(*mom.cost_estimate - J), 4.0 * *mom.cost_stderr);
}

TEST(Ellipse, UnitCircle) {
  const auto pts = ellipse_points(Vector::Zero(2), Matrix::Identity(2, 2), {0, 1}, 1.0, 64);
  ASSERT_EQ(pts.size(), 64u);
  for (const auto& p : pts) EXPECT_NEAR(p.norm(), 1.0, 1e-14);
}

TEST(Ellipse, AxesScaleWithSigma) {
  Matrix cov = Matrix::Zero(3, 3);
  cov.diagonal() << 4.0, 7.0, 1.0;
  Vector mean(3);
  mean << 1.0, 5.0, -2.0;
  const auto pts = ellipse_points(mean, cov, {0, 2}, 3.0, 360);
  double xmax = 0, ymax = 0;
  for (const auto& p : pts) {
    xmax = std::max(xmax, std::abs(p.x() - 1.0));
    ymax = std::max(ymax, std::abs(p.y() + 2.0));
    EXPECT_NEAR(std::pow((p.x() - 1.0) / 6.0, 2) + std::pow((p.y() + 2.0) / 3.0, 2), 1.0, 1e-12);
  }
  EXPECT_NEAR(xmax, 6.0, 1e-12);
  EXPECT_NEAR(ymax, 3.0, 1e-12);
}

TEST(Ellipse, TestExampleTargetRadius) {
  const Scenario sc = fx::load("test_example");
  const auto pts = ellipse_points(sc.boundary.muN, sc.boundary.SigmaN, {0, 1}, 3.0, 100);
  for (const auto& p : pts) EXPECT_NEAR(p.norm(), 3.0 * std::sqrt(0.005), 1e-14);
}

TEST(Ellipse, RejectsIndefiniteAndBadDims) {
  Matrix cov(2, 2);
  cov << 1, 2, 2, 1;
  EXPECT_THROW(ellipse_points(Vector::Zero(2), cov, {0, 1}, 1.0, 10), DefinitenessError);
  EXPECT_THROW(ellipse_points(Vector::Zero(2), Matrix::Identity(2, 2), {0, 2}, 1.0, 10), DimensionError);
}

TEST(Rollout, IndefiniteSigma0Throws) {
  auto in = fx::scalar_instance();
  in.b.Sigma0 = scalar(-1.0);
  const Vector z = Vector::Zero(2);
  EXPECT_THROW(rollout(in.sys, in.b, z, z, GainProfile::zeros(2, 1, 1), GainProfile::zeros(2, 1, 1), 10, 0),
               DefinitenessError);
}
