#pragma once

#include "fbvar/random.hpp"

#include <Eigen/Dense>

#include <exception>
#include <vector>

namespace fbvar {

/// How the per-equation / per-series / per-period loops of one Gibbs block
/// are executed. Serial is the reference schedule; both consume the same
/// per-task random streams and give bit-identical results.
enum class Schedule { Serial, OpenMP };

struct Exec {
  Schedule schedule = Schedule::Serial;
  int threads = 1;

  static Exec serial() { return {Schedule::Serial, 1}; }
  static Exec parallel(int threads) { return {threads > 1 ? Schedule::OpenMP : Schedule::Serial, threads}; }
};

/// Runs fn(i) for i in [0, count). Exceptions are collected per task and the
/// lowest-index one is rethrown, so errors are schedule-independent too.
template <typename Fn>
void parallel_for(const Exec& exec, int count, Fn&& fn) {
  if (exec.schedule == Schedule::Serial || exec.threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for num_threads(exec.threads) schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Draw from N(P^{-1} b, P^{-1}) for a symmetric positive definite precision.
/// Throws NumericalError (with `what`) when P is not positive definite or the
/// moments are not finite.
Eigen::VectorXd sample_from_precision(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b, Rng& rng,
                                      const char* what);

/// Posterior mean P^{-1} b and P^{-1} for the same inputs (used by tests and
/// diagnostics).
Eigen::VectorXd precision_mean(const Eigen::MatrixXd& precision, const Eigen::VectorXd& b);

/// Symmetric tridiagonal precision given by its diagonal and first
/// off-diagonal (length n - 1).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

/// Random-walk prior precision H'H / innovation_variance plus a diffuse
/// initial-state precision on element 0.
Tridiagonal random_walk_precision(Eigen::Index length, double innovation_variance, double initial_variance);

/// Joint draw of a path from N(P^{-1} b, P^{-1}) with tridiagonal P, in O(n)
/// via the banded Cholesky factor.
Eigen::VectorXd sample_tridiagonal(const Tridiagonal& precision, const Eigen::VectorXd& b, Rng& rng,
                                   const char* what);
Eigen::VectorXd solve_tridiagonal(const Tridiagonal& precision, const Eigen::VectorXd& b, const char* what);

/// X' diag(w) X (full symmetric) and X' diag(w) y.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

}  // namespace fbvar
