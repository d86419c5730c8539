#include "fbvar/var_core.hpp"

#include "fbvar/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <iostream>
#include <string>

namespace fbvar {

VarCoefficients VarCoefficients::from_stacked(const Eigen::MatrixXd& stacked, int p) {
  const auto n = stacked.rows();
  if (p < 1 || stacked.cols() != 1 + n * p)
    throw ValidationError("stacked coefficients must be N x (1 + N p)");
  VarCoefficients c;
  c.intercept = stacked.col(0);
  for (int j = 0; j < p; ++j) c.lags.push_back(stacked.middleCols(1 + j * n, n));
  return c;
}

Eigen::MatrixXd VarCoefficients::stacked() const {
  const auto n = dim();
  Eigen::MatrixXd out(n, 1 + n * order());
  out.col(0) = intercept;
  for (int j = 0; j < order(); ++j) out.middleCols(1 + j * n, n) = lags[j];
  return out;
}

Regressors build_regressors(const Eigen::MatrixXd& values, int p) {
  const auto T = values.rows();
  const auto n = values.cols();
  if (p <= 0 || p >= T)
    throw ValidationError("lag order " + std::to_string(p) + " must satisfy 0 < p < T = " + std::to_string(T));
  if (T <= p * n)
    std::clog << "note: T = " << T << " <= p * N = " << p * n << "; relying on shrinkage\n";
  Regressors r;
  const auto rows = T - p;
  r.Y = values.bottomRows(rows);
  r.X.resize(rows, 1 + n * p);
  r.X.col(0).setOnes();
  for (int j = 1; j <= p; ++j) r.X.middleCols(1 + (j - 1) * n, n) = values.middleRows(p - j, rows);
  return r;
}

Eigen::MatrixXd companion(const VarCoefficients& coeffs) {
  const auto n = coeffs.dim();
  const int p = coeffs.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int j = 0; j < p; ++j) c.block(0, j * n, n, n) = coeffs.lags[j];
  if (p > 1) c.bottomLeftCorner(n * (p - 1), n * (p - 1)).setIdentity();
  return c;
}

VmaSequence vma(const VarCoefficients& coeffs, int horizon) {
  if (horizon < 0) throw ValidationError("horizon must be nonnegative");
  const auto n = coeffs.dim();
  VmaSequence out;
  out.psi.reserve(horizon + 1);
  out.psi.push_back(Eigen::MatrixXd::Identity(n, n));
  for (int h = 1; h <= horizon; ++h) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j <= std::min(h, coeffs.order()); ++j) next.noalias() += out.psi[h - j] * coeffs.lags[j - 1];
    out.psi.push_back(std::move(next));
  }
  return out;
}

double spectral_radius(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw ValidationError("spectral radius needs a square matrix");
  if (matrix.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace fbvar
