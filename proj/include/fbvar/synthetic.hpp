#pragma once

#include "fbvar/data.hpp"
#include "fbvar/identification.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fbvar {

/// A linear 0 -> `to` drift of one loading over the sample.
struct LoadingRamp {
  int row = 0;
  int shock = 0;
  double from = 0.0;
  double to = 1.0;
};

struct TruthSpec {
  int m = 2;
  int n_core = 7;
  int n_other = 3;
  int r = 3;
  int p = 2;
  int T = 400;
  /// Stacked N x (1 + N p) coefficients; drawn when absent.
  std::optional<Eigen::MatrixXd> phi;
  /// N x r loadings; drawn from the scheme when absent.
  std::optional<Eigen::MatrixXd> loadings;
  std::optional<RestrictionScheme> scheme;  // default_scheme when absent
  std::optional<double> student_t_dof;      // macro idiosyncratic errors
  double variance_break = 1.0;              // macro variances multiplied from T/2 on
  std::optional<LoadingRamp> ramp;
  double instrument_sparsity = 0.6;  // share of months with the instrument signal zeroed
  double instrument_variance = 0.05;
  double macro_variance_low = 0.2;
  double macro_variance_high = 0.5;
  double max_spectral_radius = 0.95;
  bool strict = false;  // unstable phi is an error instead of being rescaled
  int burn_in = 100;
  Month start{1990, 1};

  int N() const { return m + n_core + n_other; }
};

struct TruthBundle {
  int p = 0;
  Eigen::MatrixXd phi;                       // N x (1 + N p)
  Eigen::MatrixXd loadings;                  // N x r at the first period
  std::vector<Eigen::MatrixXd> loading_path;  // per data row, only when a ramp is set
  Eigen::VectorXd w;                         // instrument idiosyncratic variances
  Eigen::MatrixXd macro_var;                 // T x n idiosyncratic variance paths
  std::optional<double> dof;
  Eigen::MatrixXd factors;  // T x r
  Eigen::MatrixXi instrument_active;  // T x 1, 0 where the signal was zeroed
  RestrictionScheme scheme;
  double spectral_radius = 0.0;
  double rescaled_by = 1.0;  // factor applied to the lag matrices to enforce stability

  Eigen::MatrixXd loadings_at(int data_row) const;
};

struct Simulation {
  Dataset data;
  TruthBundle truth;
};

/// Throws ValidationError on inconsistent dimensions (including T <= p).
Simulation simulate(const TruthSpec& spec, std::uint64_t seed);

/// (H+1) x N exact response to a unit innovation in factor `shock`, with the
/// loadings of data row `at_row` when given.
Eigen::MatrixXd oracle_irf(const TruthBundle& truth, int shock, int horizon, std::optional<int> at_row = std::nullopt);

/// Brute-force propagation of a one-unit factor impulse through the VAR with
/// all other innovations off; the independent check on the VMA recursion.
Eigen::MatrixXd propagate_impulse(const Eigen::MatrixXd& phi_stacked, int p, const Eigen::VectorXd& impact,
                                  int horizon);

void write_truth(const std::string& path, const TruthBundle& truth, const std::vector<std::string>& names);

/// Variable names of the default instance: Target, Path, the core mnemonics, X1...
std::vector<std::string> default_names(int m, int n_core, int n_other);

}  // namespace fbvar
