#pragma once

#include "fbvar/data.hpp"
#include "fbvar/distributions.hpp"
#include "fbvar/identification.hpp"
#include "fbvar/kernels.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace fbvar {

struct Features {
  bool tv_loadings = false;
  bool stoch_vol = false;
  bool student_t = false;
};

/// Prior hyperparameters and initialisation constants.
struct Priors {
  double loading_variance = 10.0;     // N(0, .) on free and sign-restricted loadings
  double intercept_variance = 100.0;  // intercepts are not shrunk
  double variance_shape = 3.0;        // W and constant Sigma ~ IG(shape, scale)
  double variance_scale = 0.5;
  double omega_shape = 3.0;           // log-volatility innovation variance
  double omega_scale = 0.003;
  double initial_state_variance = 10.0;  // first state of every random-walk path
  double ridge_penalty = 1.0;
  double initial_q = 1e-3;
  double initial_dof = 30.0;
  double initial_dof_step = 0.5;
  /// When set, lag coefficients get this fixed prior variance and the
  /// horseshoe hierarchy is not updated.
  std::optional<double> fixed_phi_prior_variance;
};

struct ModelSpec {
  int p = 2;
  int r = 4;
  Features features;
  RestrictionScheme scheme;
  int draws = 1000;
  int burn = 0;
  int thin = 1;
  std::uint64_t seed = 1;
  Priors priors;
};

/// Throws ValidationError when the spec and dataset disagree.
void validate_spec(const Dataset& ds, const ModelSpec& spec);

struct TScaleState {
  Eigen::MatrixXd mixing;  // T x n
  Eigen::VectorXd dof;     // n
};

/// Full parameter state of one Gibbs iteration. T is the effective sample
/// length (data rows minus p); N = m + n.
struct ChainState {
  Eigen::MatrixXd phi;        // N x (1 + N p), row i = equation i
  Eigen::MatrixXd loadings;   // N x r; tv rows hold their final-period value
  Eigen::MatrixXd tv_paths;   // (#tv coefficients) x T
  Eigen::VectorXd tv_anchor;  // prior mean of each path's first state
  Eigen::MatrixXd factors;    // T x r
  Eigen::VectorXd w;          // m instrument idiosyncratic variances
  Eigen::MatrixXd macro_var;  // n x T idiosyncratic variance paths (exp of log-vol)
  Eigen::VectorXd q;          // random-walk innovation variance per tv coefficient
  Eigen::VectorXd omega2;     // n log-volatility innovation variances
  std::vector<HorseshoeState> horseshoe_phi;  // one per equation, over lag coefficients
  HorseshoeState horseshoe_q;
  TScaleState tscale;
  Eigen::MatrixXi mixture;  // n x T log chi^2 mixture indicators
};

/// Dimensions shared by every stored draw.
struct DrawLayout {
  int N = 0, m = 0, r = 0, p = 0, T = 0;
  Features features;
  std::vector<std::pair<int, int>> tv_coefs;  // (row, shock) of each tv path

  int n() const { return N - m; }
  int K() const { return 1 + N * p; }
  /// Index into tv_paths, or -1.
  int tv_index(int row, int shock) const;
};

struct StoredDraw {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd loadings;
  Eigen::MatrixXd tv_paths;
  Eigen::VectorXd q;
  Eigen::VectorXd w;
  Eigen::MatrixXd macro_var;  // n x T with stochastic volatility, n x 1 otherwise
  Eigen::VectorXd omega2;     // empty without stochastic volatility
  Eigen::VectorXd dof;        // empty without Student-t errors
  double spectral_radius = 0.0;
  double dof_acceptance = 0.0;  // mean Metropolis acceptance so far (NaN when unused)

  /// Stacked [Gamma; Lambda] loadings at period t (tv rows from their paths).
  Eigen::MatrixXd loadings_at(const DrawLayout& layout, int t) const;
};

struct PosteriorDraws {
  DrawLayout layout;
  std::vector<StoredDraw> draws;
  bool truncated = false;

  std::size_t size() const { return draws.size(); }
};

struct RunOptions {
  Exec exec = Exec::serial();
  const std::atomic<bool>* stop = nullptr;  // checked once per iteration
  std::function<void(int done, int total)> progress;
  std::ostream* log = nullptr;
};

/// One chain. Each block draws its random numbers from substreams keyed by
/// (seed, iteration, block, task), so the schedule never changes the output.
class GibbsSampler {
 public:
  /// `ds` should already be standardised if that is wanted.
  GibbsSampler(const Dataset& ds, const ModelSpec& spec, Exec exec = Exec::serial());

  const ChainState& state() const { return state_; }
  ChainState& mutable_state() { return state_; }
  const DrawLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& Y() const { return Y_; }
  const Eigen::MatrixXd& X() const { return X_; }
  long iteration() const { return iteration_; }

  void step_phi();
  void step_loadings();
  void step_factors();
  void step_variances();
  void step_stochvol();
  void step_tv_loadings();
  void step_dof();

  /// All blocks in order, then advances the iteration counter.
  void iterate();
  /// Moves to the next iteration's random streams (iterate() does this itself).
  void advance() { ++iteration_; }

  StoredDraw snapshot() const;

  /// E = Y - X Phi'.
  Eigen::MatrixXd var_residuals() const;
  /// E minus the common component.
  Eigen::MatrixXd idiosyncratic_residuals() const;
  /// Idiosyncratic variance of row i at period t (mixing scales folded in).
  double idio_variance(int row, int t) const;
  double loading(int row, int shock, int t) const;
  /// Fraction of accepted dof proposals per macro series.
  Eigen::VectorXd dof_acceptance() const;

 private:
  void initialise();
  void refresh_residuals();
  void refresh_idiosyncratic();
  Rng stream(int block, int task) const;

  ModelSpec spec_;
  Exec exec_;
  DrawLayout layout_;
  Eigen::MatrixXd Y_, X_, XtX_;
  int N_, m_, n_, r_, T_, K_;
  std::vector<std::vector<int>> tv_of_;  // row -> shock -> tv index or -1
  std::vector<int> tv_rows_;
  ChainState state_;
  Eigen::MatrixXd E_;  // var residuals for the current phi
  Eigen::MatrixXd U_;  // idiosyncratic residuals for the current state
  long iteration_ = 0;
  Eigen::VectorXd dof_step_;
  Eigen::VectorXi dof_accepted_, dof_window_accepted_;
  long dof_proposals_ = 0;
};

/// Burn-in plus draws iterations, keeping every thin-th post-burn state.
PosteriorDraws run_chain(const Dataset& ds, const ModelSpec& spec, const RunOptions& options = {});

}  // namespace fbvar
