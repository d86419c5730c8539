#include "fbvar/synthetic.hpp"

#include "fbvar/distributions.hpp"
#include "fbvar/error.hpp"
#include "fbvar/random.hpp"
#include "fbvar/var_core.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

namespace fbvar {

namespace {

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd draw_phi(const TruthSpec& spec, Rng& rng) {
  const int N = spec.N();
  // Sparse dynamics: persistent own first lags, a few clear cross effects at
  // lag one, everything else exactly zero.
  std::uniform_real_distribution<double> own(0.4, 0.8), cross(0.2, 0.4), intercept(-0.1, 0.1);
  std::bernoulli_distribution link(0.1), sign(0.5);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(N, 1 + N * spec.p);
  // Instrument rows stay zero: surprises are unpredictable.
  for (int i = spec.m; i < N; ++i) {
    phi(i, 0) = intercept(rng);
    for (int k = spec.m; k < N; ++k) {
      double& c = phi(i, 1 + k);
      if (k == i)
        c = own(rng);
      else if (link(rng))
        c = sign(rng) ? cross(rng) : -cross(rng);
    }
  }
  return phi;
}

Eigen::MatrixXd draw_loadings(const RestrictionScheme& scheme, Rng& rng) {
  std::uniform_real_distribution<double> magnitude(0.3, 1.0);
  std::normal_distribution<double> free(0.0, 0.5);
  Eigen::MatrixXd g(scheme.rows(), scheme.shocks());
  for (std::size_t i = 0; i < scheme.rows(); ++i)
    for (std::size_t j = 0; j < scheme.shocks(); ++j) {
      double& x = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      switch (scheme.at(i, j)) {
        case Restriction::Pos: x = magnitude(rng); break;
        case Restriction::Neg: x = -magnitude(rng); break;
        case Restriction::Zero: x = 0.0; break;
        case Restriction::Free: x = free(rng); break;
      }
    }
  return g;
}

}  // namespace

std::vector<std::string> default_names(int m, int n_core, int n_other) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back(m == 2 ? (i == 0 ? "Target" : "Path") : "Z" + std::to_string(i + 1));
  for (int i = 0; i < n_core; ++i)
    names.push_back(n_core == 7 ? kTable2CoreRows[static_cast<std::size_t>(i)] : "CORE" + std::to_string(i + 1));
  for (int i = 0; i < n_other; ++i) names.push_back("X" + std::to_string(i + 1));
  return names;
}

Eigen::MatrixXd TruthBundle::loadings_at(int data_row) const {
  if (loading_path.empty()) return loadings;
  if (data_row < 0 || data_row >= static_cast<int>(loading_path.size()))
    throw ValidationError("range error: row " + std::to_string(data_row) + " outside the simulated sample");
  return loading_path[static_cast<std::size_t>(data_row)];
}

Simulation simulate(const TruthSpec& spec, std::uint64_t seed) {
  if (spec.m < 0 || spec.n_core < 0 || spec.n_other < 0 || spec.N() < 1) throw ValidationError("invalid block sizes");
  if (spec.r < 1) throw ValidationError("r must be at least 1");
  if (spec.p < 1) throw ValidationError("p must be at least 1");
  if (spec.T <= spec.p) throw ValidationError("T = " + std::to_string(spec.T) + " must exceed p = " + std::to_string(spec.p));
  if (spec.burn_in < 0) throw ValidationError("burn-in must be nonnegative");
  if (!(spec.instrument_sparsity >= 0.0 && spec.instrument_sparsity < 1.0))
    throw ValidationError("instrument sparsity must lie in [0, 1)");
  if (!(spec.variance_break > 0.0)) throw ValidationError("variance break must be positive");
  if (!(spec.instrument_variance > 0.0) || !(spec.macro_variance_low > 0.0) ||
      !(spec.macro_variance_high >= spec.macro_variance_low))
    throw ValidationError("idiosyncratic variances must be positive");
  if (spec.student_t_dof && !(*spec.student_t_dof > 0.0)) throw ValidationError("dof must be positive");

  const int N = spec.N(), m = spec.m, n = spec.n_core + spec.n_other, r = spec.r, p = spec.p, T = spec.T;
  Rng rng(substream(seed, 0, 0, 0));

  TruthBundle truth;
  truth.p = p;
  if (spec.scheme) {
    truth.scheme = *spec.scheme;
  } else {
    const auto names = default_names(m, spec.n_core, spec.n_other);
    truth.scheme = (m == 2 && spec.n_core == 7 && r >= 2) ? default_scheme(m, spec.n_core, spec.n_other, r, names)
                                                          : instrument_scheme(m, spec.n_core, spec.n_other, r);
    if (!(m == 2 && spec.n_core == 7 && r >= 2)) truth.scheme.row_labels = names;
  }
  if (static_cast<int>(truth.scheme.rows()) != N || static_cast<int>(truth.scheme.shocks()) != r)
    throw ValidationError("scheme dimensions do not match the simulated system");

  if (spec.phi) {
    if (spec.phi->rows() != N || spec.phi->cols() != 1 + N * p)
      throw ValidationError("phi must be N x (1 + N p)");
    truth.phi = *spec.phi;
  } else {
    truth.phi = draw_phi(spec, rng);
  }
  double rho = spectral_radius(companion(VarCoefficients::from_stacked(truth.phi, p)));
  if (rho >= spec.max_spectral_radius) {
    if (spec.strict)
      throw ValidationError("generating coefficients are unstable (spectral radius " + std::to_string(rho) + ")");
    // Scaling lag j by c^j scales every companion eigenvalue by c.
    const double c = 0.98 * spec.max_spectral_radius / rho;
    for (int j = 0; j < p; ++j) truth.phi.middleCols(1 + j * N, N) *= std::pow(c, j + 1);
    truth.rescaled_by = c;
    std::clog << "warning: generating coefficients rescaled by " << c << " (spectral radius " << rho << ")\n";
    rho = spectral_radius(companion(VarCoefficients::from_stacked(truth.phi, p)));
  }
  truth.spectral_radius = rho;

  if (spec.loadings) {
    if (spec.loadings->rows() != N || spec.loadings->cols() != r) throw ValidationError("loadings must be N x r");
    truth.loadings = *spec.loadings;
  } else {
    truth.loadings = draw_loadings(truth.scheme, rng);
  }
  if (spec.ramp) {
    const auto& ramp = *spec.ramp;
    if (ramp.row < 0 || ramp.row >= N || ramp.shock < 0 || ramp.shock >= r)
      throw ValidationError("ramp coordinates out of range");
    truth.loading_path.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      Eigen::MatrixXd g = truth.loadings;
      g(ramp.row, ramp.shock) = ramp.from + (ramp.to - ramp.from) * t / std::max(T - 1, 1);
      truth.loading_path.push_back(std::move(g));
    }
    truth.loadings = truth.loading_path.front();
  }

  truth.w = Eigen::VectorXd::Constant(m, spec.instrument_variance);
  std::uniform_real_distribution<double> sigma(spec.macro_variance_low, spec.macro_variance_high);
  Eigen::VectorXd base(n);
  for (int i = 0; i < n; ++i) base[i] = sigma(rng);
  truth.macro_var.resize(T, n);
  for (int t = 0; t < T; ++t)
    truth.macro_var.row(t) = base.transpose() * (t >= T / 2 ? spec.variance_break : 1.0);
  truth.dof = spec.student_t_dof;

  const int L = spec.burn_in + T;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(L + p, N);
  truth.factors.resize(T, r);
  truth.instrument_active = Eigen::MatrixXi::Ones(T, 1);
  std::bernoulli_distribution active(1.0 - spec.instrument_sparsity);
  std::gamma_distribution<double> mix_gamma(spec.student_t_dof.value_or(1.0) / 2.0, 1.0);
  Eigen::VectorXd f(r), x(1 + N * p);
  for (int s = 0; s < L; ++s) {
    const int t = s - spec.burn_in;  // data row, negative during burn-in
    const int row = s + p;
    x[0] = 1.0;
    for (int j = 1; j <= p; ++j) x.segment(1 + (j - 1) * N, N) = y.row(row - j).transpose();
    for (int k = 0; k < r; ++k) f[k] = std_normal(rng);
    const Eigen::MatrixXd& g = (t >= 0 && !truth.loading_path.empty()) ? truth.loading_path[static_cast<std::size_t>(t)]
                                                                       : truth.loadings;
    Eigen::VectorXd v = truth.phi * x + g * f;
    bool on = true;
    if (spec.instrument_sparsity > 0.0) on = active(rng);
    if (!on) v.head(m).setZero();
    for (int i = 0; i < m; ++i) v[i] += std::sqrt(truth.w[i]) * std_normal(rng);
    for (int i = 0; i < n; ++i) {
      double var = t >= 0 ? truth.macro_var(t, i) : base[i];
      if (spec.student_t_dof) var *= (*spec.student_t_dof / 2.0) / mix_gamma(rng);
      v[m + i] += std::sqrt(var) * std_normal(rng);
    }
    y.row(row) = v.transpose();
    if (t >= 0) {
      truth.factors.row(t) = f.transpose();
      truth.instrument_active(t, 0) = on ? 1 : 0;
    }
  }

  Simulation out;
  out.truth = std::move(truth);
  auto& ds = out.data;
  ds.values = y.bottomRows(T);
  for (int t = 0; t < T; ++t) ds.dates.push_back(spec.start + t);
  for (int i = 0; i < N; ++i) {
    VariableMeta meta;
    meta.mnemonic = out.truth.scheme.row_labels[static_cast<std::size_t>(i)];
    meta.role = i < m ? Role::Instrument : (i < m + spec.n_core ? Role::Core : Role::Other);
    meta.tcode = 1;
    meta.description = "synthetic";
    ds.meta.push_back(std::move(meta));
  }
  ds.zero_filled.assign(static_cast<std::size_t>(m), 0);
  return out;
}

Eigen::MatrixXd propagate_impulse(const Eigen::MatrixXd& phi_stacked, int p, const Eigen::VectorXd& impact,
                                  int horizon) {
  const auto N = phi_stacked.rows();
  if (phi_stacked.cols() != 1 + N * p || impact.size() != N) throw ValidationError("dimension mismatch");
  // y_h = sum_j Phi_j y_{h-j} with y_0 = impact and zero history.
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(horizon + 1, N);
  y.row(0) = impact.transpose();
  for (int h = 1; h <= horizon; ++h)
    for (int j = 1; j <= p && j <= h; ++j)
      for (Eigen::Index i = 0; i < N; ++i) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < N; ++k) acc += phi_stacked(i, 1 + (j - 1) * N + k) * y(h - j, k);
        y(h, i) += acc;
      }
  return y;
}

Eigen::MatrixXd oracle_irf(const TruthBundle& truth, int shock, int horizon, std::optional<int> at_row) {
  const Eigen::MatrixXd g = at_row ? truth.loadings_at(*at_row) : truth.loadings;
  if (shock < 0 || shock >= g.cols()) throw ValidationError("shock out of range");
  const auto psi = vma(VarCoefficients::from_stacked(truth.phi, truth.p), horizon).psi;
  Eigen::MatrixXd out(horizon + 1, g.rows());
  out.row(0) = g.col(shock).transpose();
  for (int h = 1; h <= horizon; ++h) out.row(h) = (psi[h] * g.col(shock)).transpose();
  return out;
}

void write_truth(const std::string& path, const TruthBundle& truth, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["variables"] = names;
  j["p"] = truth.p;
  j["phi"] = to_json(truth.phi);
  j["loadings"] = to_json(truth.loadings);
  if (!truth.loading_path.empty()) {
    auto& paths = j["loading_path"] = nlohmann::json::array();
    for (const auto& g : truth.loading_path) paths.push_back(to_json(g));
  }
  j["w"] = std::vector<double>(truth.w.data(), truth.w.data() + truth.w.size());
  j["macro_var"] = to_json(truth.macro_var);
  if (truth.dof) j["dof"] = *truth.dof;
  j["factors"] = to_json(truth.factors);
  j["instrument_active"] = to_json(truth.instrument_active.cast<double>());
  j["scheme"] = nlohmann::json::parse(scheme_to_json(truth.scheme));
  j["spectral_radius"] = truth.spectral_radius;
  j["rescaled_by"] = truth.rescaled_by;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace fbvar
