#pragma once

#include "fbvar/data.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fbvar {

/// phi_0 plus lag matrices Phi_1..Phi_p of a VAR(p).
struct VarCoefficients {
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> lags;

  Eigen::Index dim() const { return intercept.size(); }
  int order() const { return static_cast<int>(lags.size()); }

  /// From the stacked N x (1 + N p) layout [phi_0, Phi_1, ..., Phi_p].
  static VarCoefficients from_stacked(const Eigen::MatrixXd& stacked, int p);
  Eigen::MatrixXd stacked() const;
};

/// Psi_0 .. Psi_H.
struct VmaSequence {
  std::vector<Eigen::MatrixXd> psi;

  int horizon() const { return static_cast<int>(psi.size()) - 1; }
};

struct Regressors {
  Eigen::MatrixXd Y;  // (T - p) x N
  Eigen::MatrixXd X;  // (T - p) x (1 + N p), rows [1, y'_{t-1}, ..., y'_{t-p}]
};

Regressors build_regressors(const Eigen::MatrixXd& values, int p);
inline Regressors build_regressors(const Dataset& ds, int p) { return build_regressors(ds.values, p); }

Eigen::MatrixXd companion(const VarCoefficients& coeffs);
VmaSequence vma(const VarCoefficients& coeffs, int horizon);
double spectral_radius(const Eigen::MatrixXd& matrix);

}  // namespace fbvar
