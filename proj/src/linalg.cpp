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

#include "steergame/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steergame/errors.hpp"

namespace steergame {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double relative_asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Matrix psd_sqrt(const Matrix& sym, double clamp) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
  Vector ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clamp * scale) {
      std::ostringstream os;
      os << "matrix is not positive semidefinite (eigenvalue " << ev(i) << ")";
      throw DefinitenessError(os.str(), ev(i));
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

Matrix pd_inv_sqrt(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
  const Vector& ev = es.eigenvalues();
  if (ev.size() > 0 && ev(0) <= 0.0) {
    std::ostringstream os;
    os << "matrix is not positive definite (eigenvalue " << ev(0) << ")";
    throw DefinitenessError(os.str(), ev(0));
  }
  const Vector inv = ev.cwiseSqrt().cwiseInverse();
  return symmetrize(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
}

Matrix psd_factor(const Matrix& sym, double clamp) {
  Eigen::LLT<Matrix> llt(symmetrize(sym));
  if (llt.info() == Eigen::Success) return llt.matrixL();
  return psd_sqrt(sym, clamp);
}

Matrix blkdiag(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

RankInfo numerical_rank(const Matrix& m, double rank_tol) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<Matrix> svd(m);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values(0);
  if (smax == 0.0) return info;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values(i) > rank_tol * smax) ++info.rank;
  }
  return info;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace steergame
