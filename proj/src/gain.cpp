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

#include "steergame/gain.hpp"

#include <cmath>

#include "steergame/errors.hpp"

namespace steergame {

GainProfile::GainProfile(int horizon, int rows, int n)
    : rows_(rows), n_(n), blocks_(horizon, Matrix::Zero(rows, n)) {}

GainProfile::GainProfile(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DimensionError("gain profile needs at least one block");
  rows_ = static_cast<int>(blocks_[0].rows());
  n_ = static_cast<int>(blocks_[0].cols());
  for (const auto& b : blocks_) {
    if (b.rows() != rows_ || b.cols() != n_) {
      throw DimensionError("gain blocks must share one shape");
    }
  }
}

GainProfile GainProfile::from_free(const Vector& x, int horizon, int rows, int n) {
  if (x.size() != horizon * rows * n) throw DimensionError("free vector has wrong length");
  GainProfile g(horizon, rows, n);
  Eigen::Index idx = 0;
  for (int k = 0; k < horizon; ++k) {
    for (int a = 0; a < rows; ++a) {
      for (int b = 0; b < n; ++b) g.blocks_[k](a, b) = x(idx++);
    }
  }
  return g;
}

Matrix GainProfile::lifted() const {
  const int N = horizon();
  Matrix out = Matrix::Zero(N * rows_, (N + 1) * n_);
  for (int k = 0; k < N; ++k) out.block(k * rows_, k * n_, rows_, n_) = blocks_[k];
  return out;
}

Vector GainProfile::free_vector() const {
  Vector x(free_count());
  Eigen::Index idx = 0;
  for (const auto& blk : blocks_) {
    for (int a = 0; a < rows_; ++a) {
      for (int b = 0; b < n_; ++b) x(idx++) = blk(a, b);
    }
  }
  return x;
}

double GainProfile::distance(const GainProfile& other) const {
  if (other.horizon() != horizon() || other.rows_ != rows_ || other.n_ != n_) {
    throw DimensionError("gain profiles differ in shape");
  }
  double sq = 0.0;
  for (int k = 0; k < horizon(); ++k) sq += (blocks_[k] - other.blocks_[k]).squaredNorm();
  return std::sqrt(sq);
}

Vector free_part(const Matrix& full, int horizon, int rows, int n) {
  Vector x(horizon * rows * n);
  Eigen::Index idx = 0;
  for (int k = 0; k < horizon; ++k) {
    for (int a = 0; a < rows; ++a) {
      for (int b = 0; b < n; ++b) x(idx++) = full(k * rows + a, k * n + b);
    }
  }
  return x;
}

Matrix zero_pattern_part(const Matrix& full, int horizon, int rows, int n) {
  Matrix out = full;
  for (int k = 0; k < horizon; ++k) out.block(k * rows, k * n, rows, n).setZero();
  return out;
}

}  // namespace steergame
