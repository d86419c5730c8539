#include "fbvar/irf.hpp"

#include "fbvar/error.hpp"
#include "fbvar/var_core.hpp"

#include <json.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace fbvar {

Eigen::MatrixXd impulse_response(const Eigen::MatrixXd& phi_stacked, int p, const Eigen::VectorXd& impact,
                                 int horizon) {
  if (impact.size() != phi_stacked.rows()) throw ValidationError("impact column does not match the VAR dimension");
  const auto psi = vma(VarCoefficients::from_stacked(phi_stacked, p), horizon).psi;
  Eigen::MatrixXd out(horizon + 1, impact.size());
  out.row(0) = impact.transpose();
  for (int h = 1; h <= horizon; ++h) out.row(h) = (psi[h] * impact).transpose();
  return out;
}

Eigen::MatrixXd irf_draw(const StoredDraw& draw, const DrawLayout& layout, int shock, int horizon,
                         std::optional<int> at_time) {
  if (shock < 0 || shock >= layout.r)
    throw ValidationError("shock " + std::to_string(shock) + " out of range (r = " + std::to_string(layout.r) + ")");
  if (horizon < 0) throw ValidationError("horizon must be nonnegative");
  if (!at_time) return impulse_response(draw.phi, layout.p, draw.loadings.col(shock), horizon);
  if (!layout.features.tv_loadings) throw ValidationError("time-indexed responses need time-varying loadings");
  if (*at_time < 0 || *at_time >= layout.T)
    throw ValidationError("range error: period " + std::to_string(*at_time) + " outside 0.." +
                          std::to_string(layout.T - 1));
  return impulse_response(draw.phi, layout.p, draw.loadings_at(layout, *at_time).col(shock), horizon);
}

double quantile_sorted(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::array<double, 5> band(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::array<double, 5> out{};
  for (std::size_t k = 0; k < kBandLevels.size(); ++k) out[k] = quantile_sorted(values, kBandLevels[k]);
  return out;
}

const std::array<double, 5>& IrfResult::at(std::size_t slot, std::size_t s, int h, std::size_t v) const {
  return values[((slot * shocks.size() + s) * static_cast<std::size_t>(horizon + 1) + static_cast<std::size_t>(h)) *
                    variables.size() +
                v];
}

std::array<double, 5>& IrfResult::at(std::size_t slot, std::size_t s, int h, std::size_t v) {
  return values[((slot * shocks.size() + s) * static_cast<std::size_t>(horizon + 1) + static_cast<std::size_t>(h)) *
                    variables.size() +
                v];
}

IrfResult summarize(const PosteriorDraws& draws, const std::vector<int>& shocks, int horizon,
                    const std::vector<int>& times, const std::optional<Eigen::VectorXd>& scale,
                    const std::vector<std::string>& variables, const std::vector<std::string>& shock_labels,
                    const Exec& exec) {
  if (draws.size() < kMinDrawsForBands)
    throw ValidationError("need at least " + std::to_string(kMinDrawsForBands) + " stored draws, have " +
                          std::to_string(draws.size()));
  const auto& l = draws.layout;
  const auto N = static_cast<std::size_t>(l.N);
  if (scale && scale->size() != l.N) throw ValidationError("scale vector does not match the variables");

  IrfResult out;
  out.horizon = horizon;
  out.times = times;
  out.shock_index = shocks;
  out.original_units = scale.has_value();
  for (std::size_t v = 0; v < N; ++v)
    out.variables.push_back(v < variables.size() ? variables[v] : "y" + std::to_string(v + 1));
  for (int s : shocks)
    out.shocks.push_back(static_cast<std::size_t>(s) < shock_labels.size() ? shock_labels[static_cast<std::size_t>(s)]
                                                                           : "shock" + std::to_string(s + 1));
  const std::size_t S = shocks.size();
  const std::size_t H1 = static_cast<std::size_t>(horizon) + 1;
  out.values.resize(out.slots() * S * H1 * N);

  const std::size_t D = draws.size();
  const int jobs = static_cast<int>(out.slots() * S);
  parallel_for(exec, jobs, [&](int job) {
    const std::size_t slot = static_cast<std::size_t>(job) / S;
    const std::size_t s = static_cast<std::size_t>(job) % S;
    const std::optional<int> t = times.empty() ? std::nullopt : std::optional<int>(times[slot]);
    // cells[h * N + v][d]
    std::vector<std::vector<double>> cells(H1 * N, std::vector<double>(D));
    for (std::size_t d = 0; d < D; ++d) {
      const Eigen::MatrixXd irf = irf_draw(draws.draws[d], l, shocks[s], horizon, t);
      for (std::size_t h = 0; h < H1; ++h)
        for (std::size_t v = 0; v < N; ++v) {
          const double x = irf(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(v));
          cells[h * N + v][d] = scale ? x * (*scale)[static_cast<Eigen::Index>(v)] : x;
        }
    }
    for (std::size_t h = 0; h < H1; ++h)
      for (std::size_t v = 0; v < N; ++v) out.at(slot, s, static_cast<int>(h), v) = band(std::move(cells[h * N + v]));
  });
  return out;
}

StructuralMatrices structural_matrices(const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& phi_stacked) {
  if (loadings.rows() != phi_stacked.rows()) throw ValidationError("loadings and coefficients disagree on N");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(loadings);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[sv.size() - 1] > 1e-12 * std::max(1.0, sv[0])) || loadings.cols() > loadings.rows())
    throw NumericalError("loading matrix is rank deficient; pseudo-inverse undefined");
  StructuralMatrices out;
  const Eigen::MatrixXd gram = loadings.transpose() * loadings;
  out.A = gram.ldlt().solve(loadings.transpose());
  out.B = out.A * phi_stacked;
  return out;
}

StructuralMatrices structural_matrices(const StoredDraw& draw, const DrawLayout& layout, std::optional<int> at_time) {
  if (at_time && (*at_time < 0 || *at_time >= layout.T)) throw ValidationError("range error: period out of sample");
  return structural_matrices(at_time ? draw.loadings_at(layout, *at_time) : draw.loadings, draw.phi);
}

Eigen::MatrixXd impact_surface(const PosteriorDraws& draws, int shock, int variable) {
  const auto& l = draws.layout;
  if (variable < 0 || variable >= l.N || shock < 0 || shock >= l.r)
    throw ValidationError("impact surface: variable or shock out of range");
  const int c = l.tv_index(variable, shock);
  if (c < 0)
    throw ValidationError("impact surface: variable " + std::to_string(variable) +
                          " has a constant loading on this shock; use irf_draw for its responses");
  if (draws.size() == 0) throw ValidationError("impact surface: no draws");
  Eigen::MatrixXd out(l.T, 5);
  std::vector<double> cell(draws.size());
  for (int t = 0; t < l.T; ++t) {
    for (std::size_t d = 0; d < draws.size(); ++d) cell[d] = draws.draws[d].tv_paths(c, t);
    const auto b = band(cell);
    for (int k = 0; k < 5; ++k) out(t, k) = b[static_cast<std::size_t>(k)];
  }
  return out;
}

void write_irf_csv(const std::string& path, const IrfResult& result) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  const bool timed = !result.times.empty();
  std::fprintf(f, timed ? "shock,variable,horizon,time,q05,q16,q50,q84,q95\n"
                        : "shock,variable,horizon,q05,q16,q50,q84,q95\n");
  for (std::size_t slot = 0; slot < result.slots(); ++slot)
    for (std::size_t s = 0; s < result.shocks.size(); ++s)
      for (std::size_t v = 0; v < result.variables.size(); ++v)
        for (int h = 0; h <= result.horizon; ++h) {
          const auto& b = result.at(slot, s, h, v);
          std::fprintf(f, "%s,%s,%d,", result.shocks[s].c_str(), result.variables[v].c_str(), h);
          if (timed) std::fprintf(f, "%d,", result.times[slot]);
          std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", b[0], b[1], b[2], b[3], b[4]);
        }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

void write_irf_json(const std::string& path, const IrfResult& result) {
  nlohmann::json j;
  j["horizon"] = result.horizon;
  j["variables"] = result.variables;
  j["shocks"] = result.shocks;
  j["quantiles"] = kBandLevels;
  j["units"] = result.original_units ? "original" : "standardized";
  if (!result.times.empty()) j["times"] = result.times;
  // values[slot][shock][horizon][variable] = [q05, q16, q50, q84, q95]
  auto& values = j["values"] = nlohmann::json::array();
  for (std::size_t slot = 0; slot < result.slots(); ++slot) {
    nlohmann::json per_shock = nlohmann::json::array();
    for (std::size_t s = 0; s < result.shocks.size(); ++s) {
      nlohmann::json per_h = nlohmann::json::array();
      for (int h = 0; h <= result.horizon; ++h) {
        nlohmann::json per_v = nlohmann::json::array();
        for (std::size_t v = 0; v < result.variables.size(); ++v) per_v.push_back(result.at(slot, s, h, v));
        per_h.push_back(std::move(per_v));
      }
      per_shock.push_back(std::move(per_h));
    }
    values.push_back(std::move(per_shock));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

void write_surface_csv(const std::string& path, const std::string& shock, const std::string& variable,
                       const Eigen::MatrixXd& surface, const std::vector<Month>& dates) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "shock,variable,horizon,time,q05,q16,q50,q84,q95\n");
  for (Eigen::Index t = 0; t < surface.rows(); ++t) {
    const std::string when = static_cast<std::size_t>(t) < dates.size() ? dates[static_cast<std::size_t>(t)].str()
                                                                          : std::to_string(t);
    std::fprintf(f, "%s,%s,0,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", shock.c_str(), variable.c_str(), when.c_str(),
                 surface(t, 0), surface(t, 1), surface(t, 2), surface(t, 3), surface(t, 4));
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

}  // namespace fbvar
