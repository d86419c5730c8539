#include "fbvar/kernels.hpp"

#include "fbvar/error.hpp"

#include <cmath>
#include <string>

namespace fbvar {

Eigen::VectorXd sample_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng,
                                      const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": posterior precision not positive definite");
  Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(b.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = std_normal(rng);
  // L L' = P, so L'^{-1} z has covariance P^{-1}.
  Eigen::VectorXd x = mean + llt.matrixU().solve(z);
  if (!x.allFinite()) throw NumericalError(std::string(what) + ": non-finite conditional moments");
  return x;
}

Eigen::VectorXd precision_mean(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b) {
  return precision.llt().solve(b);
}

Tridiagonal random_walk_precision(Eigen::Index length, double innovation_variance, double initial_variance) {
  Tridiagonal p;
  p.diag = Eigen::VectorXd::Zero(length);
  p.off = Eigen::VectorXd::Zero(std::max<Eigen::Index>(length - 1, 0));
  const double inv_q = 1.0 / innovation_variance;
  for (Eigen::Index t = 1; t < length; ++t) {
    p.diag[t - 1] += inv_q;
    p.diag[t] += inv_q;
    p.off[t - 1] = -inv_q;
  }
  p.diag[0] += 1.0 / initial_variance;
  return p;
}

namespace {

// Banded Cholesky P = L L' with L lower bidiagonal (ld diagonal, lo subdiagonal).
void cholesky_tridiagonal(const Tridiagonal& p, Eigen::VectorXd& ld, Eigen::VectorXd& lo, const char* what) {
  const auto n = p.diag.size();
  ld.resize(n);
  lo.resize(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index t = 0; t < n; ++t) {
    double d = p.diag[t];
    if (t > 0) {
      lo[t - 1] = p.off[t - 1] / ld[t - 1];
      d -= lo[t - 1] * lo[t - 1];
    }
    if (!(d > 0.0) || !std::isfinite(d))
      throw NumericalError(std::string(what) + ": banded factorisation failed at t=" + std::to_string(t));
    ld[t] = std::sqrt(d);
  }
}

// Solves L x = b in place.
void forward(const Eigen::VectorXd& ld, const Eigen::VectorXd& lo, Eigen::VectorXd& x) {
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    if (t > 0) x[t] -= lo[t - 1] * x[t - 1];
    x[t] /= ld[t];
  }
}

// Solves L' x = b in place.
void backward(const Eigen::VectorXd& ld, const Eigen::VectorXd& lo, Eigen::VectorXd& x) {
  for (Eigen::Index t = x.size() - 1; t >= 0; --t) {
    if (t + 1 < x.size()) x[t] -= lo[t] * x[t + 1];
    x[t] /= ld[t];
  }
}

}  // namespace

Eigen::VectorXd solve_tridiagonal(const Tridiagonal& precision, const Eigen::VectorXd& b, const char* what) {
  Eigen::VectorXd ld, lo;
  cholesky_tridiagonal(precision, ld, lo, what);
  Eigen::VectorXd x = b;
  forward(ld, lo, x);
  backward(ld, lo, x);
  return x;
}

Eigen::VectorXd sample_tridiagonal(const Tridiagonal& precision, const Eigen::VectorXd& b, Rng& rng,
                                   const char* what) {
  Eigen::VectorXd ld, lo;
  cholesky_tridiagonal(precision, ld, lo, what);
  // mean = L'^{-1} L^{-1} b; draw = L'^{-1} (L^{-1} b + z).
  Eigen::VectorXd x = b;
  forward(ld, lo, x);
  for (Eigen::Index t = 0; t < x.size(); ++t) x[t] += std_normal(rng);
  backward(ld, lo, x);
  if (!x.allFinite()) throw NumericalError(std::string(what) + ": non-finite path draw");
  return x;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd Xw = X.array().colwise() * w.array().sqrt();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(Xw.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace fbvar
