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

#include <Eigen/Dense>

#include <vector>

namespace steergame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

// Largest absolute entry of M - M^T relative to max(1, |M|_max).
double relative_asymmetry(const Matrix& m);

double min_eigenvalue(const Matrix& sym);
double max_eigenvalue(const Matrix& sym);

// Symmetric square root of a PSD matrix. Eigenvalues in [-clamp, 0) are
// treated as zero; anything more negative throws DefinitenessError.
Matrix psd_sqrt(const Matrix& sym, double clamp = 1e-10);

// Symmetric inverse square root of a positive definite matrix.
Matrix pd_inv_sqrt(const Matrix& sym);

// Lower factor F with F F^T = sym. Uses Cholesky when possible and falls
// back to the symmetric square root for semidefinite input.
Matrix psd_factor(const Matrix& sym, double clamp = 1e-10);

Matrix blkdiag(const std::vector<Matrix>& blocks);

struct RankInfo {
  int rank = 0;
  Vector singular_values;
};

// Numerical rank: number of singular values above rank_tol * sigma_max.
RankInfo numerical_rank(const Matrix& m, double rank_tol);

double spectral_norm(const Matrix& m);

}  // namespace steergame
