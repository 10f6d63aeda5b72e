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

// Block-diagonal feedback gain acting on the stacked auxiliary process Y:
//
//   [G_0  0   ...  0       0]
//   [0    G_1 ...  0       0]
//   [          ...          ]
//   [0    0   ...  G_{N-1} 0]
//
// Each G_k is rows x n. Only the diagonal blocks are stored, so entries off
// the pattern are zero by construction.
class GainProfile {
 public:
  GainProfile() = default;
  GainProfile(int horizon, int rows, int n);
  explicit GainProfile(std::vector<Matrix> blocks);

  static GainProfile zeros(int horizon, int rows, int n) { return {horizon, rows, n}; }
  // Inverse of free_vector().
  static GainProfile from_free(const Vector& x, int horizon, int rows, int n);

  int horizon() const { return static_cast<int>(blocks_.size()); }
  int rows() const { return rows_; }
  int n() const { return n_; }
  int free_count() const { return horizon() * rows_ * n_; }

  const Matrix& block(int k) const { return blocks_[k]; }
  Matrix& block(int k) { return blocks_[k]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  // N*rows x (N+1)*n matrix with the trailing zero block column.
  Matrix lifted() const;

  // Free entries ordered (k, row, col), row-major inside each block.
  Vector free_vector() const;

  // Frobenius norm of the difference of the lifted matrices.
  double distance(const GainProfile& other) const;

 private:
  int rows_ = 0;
  int n_ = 0;
  std::vector<Matrix> blocks_;
};

// Extracts the free (block-diagonal) entries of a full-size matrix in the
// GainProfile ordering.
Vector free_part(const Matrix& full, int horizon, int rows, int n);

// Copy of `full` with the free entries set to zero.
Matrix zero_pattern_part(const Matrix& full, int horizon, int rows, int n);

}  // namespace steergame
