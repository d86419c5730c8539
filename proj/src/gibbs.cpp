#include "fbvar/gibbs.hpp"

#include "fbvar/error.hpp"
#include "fbvar/var_core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fbvar {

namespace {

enum Block : int {
  kBlockPhi = 1,
  kBlockLoadings,
  kBlockFactors,
  kBlockVariances,
  kBlockStochVol,
  kBlockTvPaths,
  kBlockTvShrinkage,
  kBlockDof,
};

// Floor on random-walk innovation variances so 1/q stays finite.
constexpr double kMinInnovationVariance = 1e-12;
constexpr double kMinVariance = 1e-8;
constexpr int kDofAdaptWindow = 50;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

int DrawLayout::tv_index(int row, int shock) const {
  for (std::size_t c = 0; c < tv_coefs.size(); ++c)
    if (tv_coefs[c].first == row && tv_coefs[c].second == shock) return static_cast<int>(c);
  return -1;
}

Eigen::MatrixXd StoredDraw::loadings_at(const DrawLayout& layout, int t) const {
  Eigen::MatrixXd g = loadings;
  for (std::size_t c = 0; c < layout.tv_coefs.size(); ++c)
    g(layout.tv_coefs[c].first, layout.tv_coefs[c].second) = tv_paths(static_cast<Eigen::Index>(c), t);
  return g;
}

void validate_spec(const Dataset& ds, const ModelSpec& spec) {
  const int N = static_cast<int>(ds.cols());
  const int m = ds.num_instruments();
  for (int i = 0; i < m; ++i)
    if (ds.meta[i].role != Role::Instrument)
      throw ValidationError("instrument columns must occupy the first m columns");
  if (spec.draws <= 0) throw ValidationError("draws must be positive");
  if (spec.burn < 0) throw ValidationError("burn must be nonnegative");
  if (spec.thin < 1) throw ValidationError("thin must be at least 1");
  if (spec.p < 1) throw ValidationError("lag order p must be at least 1");
  if (spec.r < m) throw ValidationError("r must be at least the number of instruments");
  if (ds.rows() - spec.p < 2) throw ValidationError("sample too short for lag order");
  if (!ds.values.allFinite()) throw ValidationError("dataset contains non-finite values");
  const auto violations = validate(spec.scheme, m, N - m, spec.r);
  if (!violations.empty()) throw ValidationError("restriction scheme invalid: " + join(violations));
  check_rows_match(spec.scheme, ds.mnemonics());
}

// ---------------------------------------------------------------- setup

GibbsSampler::GibbsSampler(const Dataset& ds, const ModelSpec& spec, Exec exec) : spec_(spec), exec_(exec) {
  validate_spec(ds, spec);
  auto reg = build_regressors(ds, spec.p);
  Y_ = std::move(reg.Y);
  X_ = std::move(reg.X);
  N_ = static_cast<int>(Y_.cols());
  m_ = ds.num_instruments();
  n_ = N_ - m_;
  r_ = spec.r;
  T_ = static_cast<int>(Y_.rows());
  K_ = static_cast<int>(X_.cols());
  XtX_ = weighted_gram(X_, Eigen::VectorXd::Ones(T_));

  layout_.N = N_;
  layout_.m = m_;
  layout_.r = r_;
  layout_.p = spec.p;
  layout_.T = T_;
  layout_.features = spec.features;

  tv_of_.assign(N_, std::vector<int>(r_, -1));
  if (spec.features.tv_loadings) {
    for (int i = m_; i < N_; ++i) {
      if (!spec.scheme.tv_mask[i]) continue;
      tv_rows_.push_back(i);
      for (int j = 0; j < r_; ++j) {
        // Pinned zeros stay constant even on a tv row.
        if (spec.scheme.at(i, j) == Restriction::Zero) continue;
        tv_of_[i][j] = static_cast<int>(layout_.tv_coefs.size());
        layout_.tv_coefs.emplace_back(i, j);
      }
    }
  }
  dof_step_ = Eigen::VectorXd::Constant(n_, spec.priors.initial_dof_step);
  dof_accepted_ = Eigen::VectorXi::Zero(n_);
  dof_window_accepted_ = Eigen::VectorXi::Zero(n_);
  initialise();
}

Rng GibbsSampler::stream(int block, int task) const {
  return substream(spec_.seed, static_cast<std::uint64_t>(iteration_), static_cast<std::uint64_t>(block),
                   static_cast<std::uint64_t>(task));
}

void GibbsSampler::initialise() {
  const auto& pr = spec_.priors;
  auto& s = state_;

  // Ridge least squares for Phi.
  Eigen::MatrixXd A = XtX_;
  A.diagonal().array() += pr.ridge_penalty;
  s.phi = A.llt().solve(X_.transpose() * Y_).transpose();
  E_ = Y_ - X_ * s.phi.transpose();

  // Factors: instrument residuals first, then principal components of what
  // they leave unexplained.
  s.factors = Eigen::MatrixXd::Zero(T_, r_);
  auto standardise = [&](Eigen::VectorXd v) {
    v.array() -= v.mean();
    const double sd = std::sqrt(v.squaredNorm() / std::max(1, T_ - 1));
    if (sd > 0.0) v /= sd;
    return v;
  };
  for (int j = 0; j < m_; ++j) s.factors.col(j) = standardise(E_.col(j));
  if (r_ > m_) {
    Eigen::MatrixXd rest = E_;
    if (m_ > 0) {
      const Eigen::MatrixXd Fi = s.factors.leftCols(m_);
      rest -= Fi * (Fi.transpose() * Fi).ldlt().solve(Fi.transpose() * E_);
    }
    for (Eigen::Index c = 0; c < rest.cols(); ++c) {
      const double sd = std::sqrt(rest.col(c).squaredNorm() / std::max(1, T_ - 1));
      if (sd > 0.0) rest.col(c) /= sd;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rest, Eigen::ComputeThinU);
    const int k = std::min<int>(r_ - m_, static_cast<int>(svd.matrixU().cols()));
    for (int j = 0; j < k; ++j) s.factors.col(m_ + j) = standardise(svd.matrixU().col(j));
  }

  // Loadings by least squares on the active columns, then projected onto the
  // restricted half-lines.
  s.loadings = Eigen::MatrixXd::Zero(N_, r_);
  for (int i = 0; i < N_; ++i) {
    std::vector<int> active;
    for (int j = 0; j < r_; ++j)
      if (spec_.scheme.at(i, j) != Restriction::Zero) active.push_back(j);
    if (active.empty()) continue;
    Eigen::MatrixXd Fa(T_, static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) Fa.col(static_cast<Eigen::Index>(a)) = s.factors.col(active[a]);
    Eigen::MatrixXd P = Fa.transpose() * Fa;
    P.diagonal().array() += 1.0 / pr.loading_variance;
    const Eigen::VectorXd coef = P.llt().solve(Fa.transpose() * E_.col(i));
    for (std::size_t a = 0; a < active.size(); ++a) {
      double v = coef[static_cast<Eigen::Index>(a)];
      const auto rule = spec_.scheme.at(i, active[a]);
      if (rule == Restriction::Pos) v = std::max(v, 1e-2);
      if (rule == Restriction::Neg) v = std::min(v, -1e-2);
      s.loadings(i, active[a]) = v;
    }
  }

  const auto C = static_cast<Eigen::Index>(layout_.tv_coefs.size());
  s.tv_paths.resize(C, T_);
  s.tv_anchor.resize(C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const double v = s.loadings(layout_.tv_coefs[c].first, layout_.tv_coefs[c].second);
    s.tv_paths.row(c).setConstant(v);
    s.tv_anchor[c] = v;
  }
  s.q = Eigen::VectorXd::Constant(C, pr.initial_q);
  s.horseshoe_q = HorseshoeState::initial(C, pr.initial_q);

  const Eigen::MatrixXd U = E_ - s.factors * s.loadings.transpose();
  s.w.resize(m_);
  for (int i = 0; i < m_; ++i) s.w[i] = std::max(U.col(i).squaredNorm() / T_, 1e-4);
  s.macro_var.resize(n_, T_);
  for (int i = 0; i < n_; ++i) s.macro_var.row(i).setConstant(std::max(U.col(m_ + i).squaredNorm() / T_, 1e-4));
  s.omega2 = Eigen::VectorXd::Constant(n_, 0.01);
  s.horseshoe_phi.assign(N_, HorseshoeState::initial(K_ - 1));
  s.tscale.mixing = Eigen::MatrixXd::Ones(T_, n_);
  s.tscale.dof = Eigen::VectorXd::Constant(n_, pr.initial_dof);
  s.mixture = Eigen::MatrixXi::Zero(n_, T_);
  refresh_idiosyncratic();
}

// ---------------------------------------------------------------- helpers

double GibbsSampler::idio_variance(int row, int t) const {
  if (row < m_) return state_.w[row];
  const int i = row - m_;
  return state_.macro_var(i, t) * state_.tscale.mixing(t, i);
}

double GibbsSampler::loading(int row, int shock, int t) const {
  const int c = tv_of_[row][shock];
  return c >= 0 ? state_.tv_paths(c, t) : state_.loadings(row, shock);
}

Eigen::MatrixXd GibbsSampler::var_residuals() const { return Y_ - X_ * state_.phi.transpose(); }

Eigen::MatrixXd GibbsSampler::idiosyncratic_residuals() const {
  Eigen::MatrixXd U = E_ - state_.factors * state_.loadings.transpose();
  for (std::size_t c = 0; c < layout_.tv_coefs.size(); ++c) {
    const auto [row, shock] = layout_.tv_coefs[c];
    for (int t = 0; t < T_; ++t)
      U(t, row) += (state_.loadings(row, shock) - state_.tv_paths(static_cast<Eigen::Index>(c), t)) *
                   state_.factors(t, shock);
  }
  return U;
}

void GibbsSampler::refresh_residuals() { E_ = Y_ - X_ * state_.phi.transpose(); }
void GibbsSampler::refresh_idiosyncratic() { U_ = idiosyncratic_residuals(); }

Eigen::VectorXd GibbsSampler::dof_acceptance() const {
  if (dof_proposals_ == 0) return Eigen::VectorXd::Constant(n_, std::numeric_limits<double>::quiet_NaN());
  return dof_accepted_.cast<double>() / static_cast<double>(dof_proposals_);
}

// ---------------------------------------------------------------- step 1: Phi

void GibbsSampler::step_phi() {
  const auto& pr = spec_.priors;
  const bool constant_weights = !spec_.features.stoch_vol && !spec_.features.student_t;
  parallel_for(exec_, N_, [&](int i) {
    Rng rng = stream(kBlockPhi, i);
    Eigen::VectorXd y = Y_.col(i);
    for (int t = 0; t < T_; ++t)
      for (int j = 0; j < r_; ++j) y[t] -= loading(i, j, t) * state_.factors(t, j);

    Eigen::MatrixXd P;
    Eigen::VectorXd b;
    if (i < m_ || constant_weights) {
      const double w = 1.0 / idio_variance(i, 0);
      P = w * XtX_;
      b = w * (X_.transpose() * y);
    } else {
      Eigen::VectorXd w(T_);
      for (int t = 0; t < T_; ++t) w[t] = 1.0 / idio_variance(i, t);
      P = weighted_gram(X_, w);
      b = X_.transpose() * (w.array() * y.array()).matrix();
    }
    auto& hs = state_.horseshoe_phi[i];
    P(0, 0) += 1.0 / pr.intercept_variance;
    for (int k = 1; k < K_; ++k)
      P(k, k) += 1.0 / (pr.fixed_phi_prior_variance ? *pr.fixed_phi_prior_variance : hs.prior_variance(k - 1));
    const Eigen::VectorXd coef = sample_from_precision(P, b, rng, "phi");
    state_.phi.row(i) = coef.transpose();
    if (!pr.fixed_phi_prior_variance) hs = update_horseshoe(hs, coef.tail(K_ - 1), 1.0, rng);
  });
  refresh_residuals();
}

// ---------------------------------------------------------------- step 2: loadings

void GibbsSampler::step_loadings() {
  const double prior_prec = 1.0 / spec_.priors.loading_variance;
  parallel_for(exec_, N_, [&](int i) {
    if (spec_.features.tv_loadings && spec_.scheme.tv_mask[i] && i >= m_) return;
    Rng rng = stream(kBlockLoadings, i);
    std::vector<int> active;
    bool signed_row = false;
    for (int j = 0; j < r_; ++j) {
      const auto rule = spec_.scheme.at(i, j);
      if (rule == Restriction::Zero) {
        state_.loadings(i, j) = 0.0;
        continue;
      }
      active.push_back(j);
      signed_row = signed_row || rule != Restriction::Free;
    }
    if (active.empty()) return;
    const auto A = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(A, A);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(A);
    for (int t = 0; t < T_; ++t) {
      const double w = 1.0 / idio_variance(i, t);
      for (Eigen::Index a = 0; a < A; ++a) {
        const double fa = state_.factors(t, active[a]);
        b[a] += w * fa * E_(t, i);
        for (Eigen::Index c = 0; c <= a; ++c) P(a, c) += w * fa * state_.factors(t, active[c]);
      }
    }
    P = P.selfadjointView<Eigen::Lower>();
    P.diagonal().array() += prior_prec;

    if (!signed_row) {
      const Eigen::VectorXd draw = sample_from_precision(P, b, rng, "loadings");
      for (Eigen::Index a = 0; a < A; ++a) state_.loadings(i, active[a]) = draw[a];
      return;
    }
    // Element-wise sweep over the truncated multivariate normal.
    for (Eigen::Index a = 0; a < A; ++a) {
      double rest = b[a];
      for (Eigen::Index c = 0; c < A; ++c)
        if (c != a) rest -= P(a, c) * state_.loadings(i, active[c]);
      const double var = 1.0 / P(a, a);
      const double mean = rest * var;
      if (!std::isfinite(mean)) throw NumericalError("loadings: non-finite conditional mean");
      double x = 0.0;
      switch (spec_.scheme.at(i, active[a])) {
        case Restriction::Pos: x = sample_truncated_normal(mean, var, Side::Positive, rng); break;
        case Restriction::Neg: x = sample_truncated_normal(mean, var, Side::Negative, rng); break;
        default: x = mean + std::sqrt(var) * std_normal(rng); break;
      }
      state_.loadings(i, active[a]) = x;
    }
  });
}

// ---------------------------------------------------------------- step 3: factors

void GibbsSampler::step_factors() {
  const bool constant = layout_.tv_coefs.empty() && !spec_.features.stoch_vol && !spec_.features.student_t;
  auto precision_at = [&](int t, Eigen::MatrixXd& G, Eigen::VectorXd& dinv) {
    G.resize(N_, r_);
    dinv.resize(N_);
    for (int i = 0; i < N_; ++i) {
      dinv[i] = 1.0 / idio_variance(i, t);
      for (int j = 0; j < r_; ++j) G(i, j) = loading(i, j, t);
    }
    Eigen::MatrixXd P = G.transpose() * dinv.asDiagonal() * G;
    P.diagonal().array() += 1.0;
    return P;
  };

  if (constant) {
    Eigen::MatrixXd G;
    Eigen::VectorXd dinv;
    const Eigen::MatrixXd P = precision_at(0, G, dinv);
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw NumericalError("factors: precision not positive definite");
    const Eigen::MatrixXd B = G.transpose() * dinv.asDiagonal() * E_.transpose();  // r x T
    const Eigen::MatrixXd means = llt.solve(B);
    parallel_for(exec_, T_, [&](int t) {
      Rng rng = stream(kBlockFactors, t);
      Eigen::VectorXd z(r_);
      for (int j = 0; j < r_; ++j) z[j] = std_normal(rng);
      state_.factors.row(t) = (means.col(t) + llt.matrixU().solve(z)).transpose();
    });
  } else {
    parallel_for(exec_, T_, [&](int t) {
      Rng rng = stream(kBlockFactors, t);
      Eigen::MatrixXd G;
      Eigen::VectorXd dinv;
      const Eigen::MatrixXd P = precision_at(t, G, dinv);
      const Eigen::VectorXd b = G.transpose() * (dinv.array() * E_.row(t).transpose().array()).matrix();
      state_.factors.row(t) = sample_from_precision(P, b, rng, "factors").transpose();
    });
  }
  if (!state_.factors.allFinite()) throw NumericalError("factors: non-finite draw");
  refresh_idiosyncratic();
}

// ---------------------------------------------------------------- step 4: variances

void GibbsSampler::step_variances() {
  const auto& pr = spec_.priors;
  const int rows = spec_.features.stoch_vol ? m_ : N_;
  parallel_for(exec_, rows, [&](int i) {
    Rng rng = stream(kBlockVariances, i);
    double ss = 0.0;
    if (i < m_) {
      ss = U_.col(i).squaredNorm();
    } else {
      for (int t = 0; t < T_; ++t) ss += U_(t, i) * U_(t, i) / state_.tscale.mixing(t, i - m_);
    }
    const double v = std::max(sample_inverse_gamma(pr.variance_shape + 0.5 * T_, pr.variance_scale + 0.5 * ss, rng),
                              kMinVariance);
    if (i < m_)
      state_.w[i] = v;
    else
      state_.macro_var.row(i - m_).setConstant(v);
  });
}

// ---------------------------------------------------------------- step 5a: stochastic volatility

void GibbsSampler::step_stochvol() {
  if (!spec_.features.stoch_vol) return;
  const auto& pr = spec_.priors;
  parallel_for(exec_, n_, [&](int i) {
    Rng rng = stream(kBlockStochVol, i);
    const int row = m_ + i;
    Eigen::VectorXd ystar(T_), h(T_);
    for (int t = 0; t < T_; ++t) {
      const double e = U_(t, row) / std::sqrt(state_.tscale.mixing(t, i));
      h[t] = std::log(state_.macro_var(i, t));
      state_.mixture(i, t) = sample_logchi2_mixture_indicator(e, h[t], rng);
      ystar[t] = std::log(e * e + kLogSquareOffset);
    }
    Tridiagonal P = random_walk_precision(T_, state_.omega2[i], pr.initial_state_variance);
    Eigen::VectorXd b(T_);
    for (int t = 0; t < T_; ++t) {
      const auto& c = kLogChi2Mixture[static_cast<std::size_t>(state_.mixture(i, t))];
      P.diag[t] += 1.0 / c.variance;
      b[t] = (ystar[t] - c.mean) / c.variance;
    }
    h = sample_tridiagonal(P, b, rng, ("stochastic volatility, series " + std::to_string(row)).c_str());
    double ss = 0.0;
    for (int t = 1; t < T_; ++t) ss += (h[t] - h[t - 1]) * (h[t] - h[t - 1]);
    state_.omega2[i] = std::max(
        sample_inverse_gamma(pr.omega_shape + 0.5 * (T_ - 1), pr.omega_scale + 0.5 * ss, rng), kMinVariance);
    state_.macro_var.row(i) = h.array().exp().max(kMinVariance).transpose();
  });
}

// ---------------------------------------------------------------- step 5b: time-varying loadings

void GibbsSampler::step_tv_loadings() {
  if (layout_.tv_coefs.empty()) return;
  const auto& pr = spec_.priors;
  const int rows = static_cast<int>(tv_rows_.size());
  parallel_for(exec_, rows, [&](int k) {
    const int i = tv_rows_[static_cast<std::size_t>(k)];
    Rng rng = stream(kBlockTvPaths, i);
    Eigen::VectorXd w(T_);
    for (int t = 0; t < T_; ++t) w[t] = 1.0 / idio_variance(i, t);
    for (int j = 0; j < r_; ++j) {
      const int c = tv_of_[i][j];
      if (c < 0) continue;
      Tridiagonal P = random_walk_precision(T_, state_.q[c], pr.initial_state_variance);
      Eigen::VectorXd b(T_);
      for (int t = 0; t < T_; ++t) {
        double y = E_(t, i);
        for (int k2 = 0; k2 < r_; ++k2)
          if (k2 != j) y -= loading(i, k2, t) * state_.factors(t, k2);
        const double f = state_.factors(t, j);
        P.diag[t] += f * f * w[t];
        b[t] = f * w[t] * y;
      }
      b[0] += state_.tv_anchor[c] / pr.initial_state_variance;
      state_.tv_paths.row(c) =
          sample_tridiagonal(P, b, rng, ("tv loadings, row " + std::to_string(i)).c_str()).transpose();
      state_.loadings(i, j) = state_.tv_paths(c, T_ - 1);
    }
  });

  // Horseshoe on the innovation variances, shared global scale.
  const auto C = static_cast<Eigen::Index>(layout_.tv_coefs.size());
  Eigen::VectorXd ss(C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const auto row = state_.tv_paths.row(c);
    ss[c] = (row.tail(T_ - 1) - row.head(T_ - 1)).squaredNorm();
  }
  Rng rng = stream(kBlockTvShrinkage, 0);
  state_.horseshoe_q = update_horseshoe_grouped(state_.horseshoe_q, ss, Eigen::VectorXd::Constant(C, T_ - 1.0), rng);
  for (Eigen::Index c = 0; c < C; ++c)
    state_.q[c] = std::max(state_.horseshoe_q.prior_variance(c), kMinInnovationVariance);
  refresh_idiosyncratic();
}

// ---------------------------------------------------------------- step 6: degrees of freedom

void GibbsSampler::step_dof() {
  if (!spec_.features.student_t) return;
  parallel_for(exec_, n_, [&](int i) {
    Rng rng = stream(kBlockDof, i);
    const auto draw = sample_dof(state_.tscale.dof[i], state_.tscale.mixing.col(i), dof_step_[i], rng);
    state_.tscale.dof[i] = draw.dof;
    if (draw.accepted) {
      ++dof_accepted_[i];
      ++dof_window_accepted_[i];
    }
    const Eigen::VectorXd resid = U_.col(m_ + i);
    const Eigen::VectorXd var = state_.macro_var.row(i).transpose();
    state_.tscale.mixing.col(i) = sample_t_scales(resid, var, state_.tscale.dof[i], rng);
  });
  ++dof_proposals_;
  // Tune the proposal during burn-in only, towards 25-40% acceptance.
  if (iteration_ < spec_.burn && (iteration_ + 1) % kDofAdaptWindow == 0) {
    for (int i = 0; i < n_; ++i) {
      const double rate = static_cast<double>(dof_window_accepted_[i]) / kDofAdaptWindow;
      if (rate < 0.25) dof_step_[i] *= 0.8;
      if (rate > 0.40) dof_step_[i] *= 1.25;
    }
    dof_window_accepted_.setZero();
  }
}

// ---------------------------------------------------------------- sweep

void GibbsSampler::iterate() {
  auto run = [&](const char* block, auto&& fn) {
    try {
      fn();
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(iteration_) + ", block " + block + ": " + e.what());
    }
  };
  run("phi", [&] { step_phi(); });
  run("loadings", [&] { step_loadings(); });
  run("factors", [&] { step_factors(); });
  run("variances", [&] { step_variances(); });
  run("stochvol", [&] { step_stochvol(); });
  run("tv_loadings", [&] { step_tv_loadings(); });
  run("dof", [&] { step_dof(); });
  ++iteration_;
}

StoredDraw GibbsSampler::snapshot() const {
  StoredDraw d;
  d.phi = state_.phi;
  d.loadings = state_.loadings;
  d.tv_paths = state_.tv_paths;
  d.q = state_.q;
  d.w = state_.w;
  if (spec_.features.stoch_vol) {
    d.macro_var = state_.macro_var;
    d.omega2 = state_.omega2;
  } else {
    d.macro_var = state_.macro_var.col(0);
  }
  if (spec_.features.student_t) {
    d.dof = state_.tscale.dof;
    d.dof_acceptance = dof_acceptance().mean();
  } else {
    d.dof_acceptance = std::numeric_limits<double>::quiet_NaN();
  }
  d.spectral_radius = spectral_radius(companion(VarCoefficients::from_stacked(state_.phi, spec_.p)));
  return d;
}

PosteriorDraws run_chain(const Dataset& ds, const ModelSpec& spec, const RunOptions& options) {
  GibbsSampler sampler(ds, spec, options.exec);
  PosteriorDraws out;
  out.layout = sampler.layout();
  const int total = spec.burn + spec.draws;
  out.draws.reserve(static_cast<std::size_t>(spec.draws / spec.thin));
  for (int it = 0; it < total; ++it) {
    if (options.stop && options.stop->load()) {
      out.truncated = true;
      if (options.log) *options.log << "interrupted at iteration " << it << "; keeping " << out.size() << " draws\n";
      break;
    }
    sampler.iterate();
    const int kept = it + 1 - spec.burn;
    if (kept > 0 && kept % spec.thin == 0) out.draws.push_back(sampler.snapshot());
    if (options.progress) options.progress(it + 1, total);
  }
  return out;
}

}  // namespace fbvar
