#pragma once

#include "fbvar/gibbs.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fbvar {

inline constexpr std::array<double, 5> kBandLevels{0.05, 0.16, 0.5, 0.84, 0.95};

/// Response of every variable to a unit innovation in factor `shock`,
/// (H+1) x N. Row 0 is the loading column itself; with `at_time` the tv
/// loadings of that period are held fixed over all horizons.
Eigen::MatrixXd irf_draw(const StoredDraw& draw, const DrawLayout& layout, int shock, int horizon,
                         std::optional<int> at_time = std::nullopt);

/// Same, from explicit coefficients and a loading column.
Eigen::MatrixXd impulse_response(const Eigen::MatrixXd& phi_stacked, int p, const Eigen::VectorXd& impact, int horizon);

/// Type-7 (linear interpolation) quantile of already sorted values.
double quantile_sorted(const std::vector<double>& sorted, double level);
std::array<double, 5> band(std::vector<double> values);

struct IrfResult {
  int horizon = 0;
  std::vector<std::string> variables;
  std::vector<std::string> shocks;  // the shocks summarised, in order
  std::vector<int> shock_index;     // column of each in the loading matrix
  std::vector<int> times;           // empty: constant-loading responses
  bool original_units = false;
  // values[((slot * S + s) * (H+1) + h) * N + v] holds the five levels.
  std::vector<std::array<double, 5>> values;

  std::size_t slots() const { return times.empty() ? 1 : times.size(); }
  const std::array<double, 5>& at(std::size_t slot, std::size_t s, int h, std::size_t v) const;
  std::array<double, 5>& at(std::size_t slot, std::size_t s, int h, std::size_t v);
};

inline constexpr std::size_t kMinDrawsForBands = 50;

/// Per-cell quantiles across draws. `scale` multiplies each variable's
/// response (pass the stored standard deviations for original units).
IrfResult summarize(const PosteriorDraws& draws, const std::vector<int>& shocks, int horizon,
                    const std::vector<int>& times = {}, const std::optional<Eigen::VectorXd>& scale = std::nullopt,
                    const std::vector<std::string>& variables = {}, const std::vector<std::string>& shock_labels = {},
                    const Exec& exec = Exec::serial());

struct StructuralMatrices {
  Eigen::MatrixXd A;  // r x N left pseudo-inverse of the loadings
  Eigen::MatrixXd B;  // r x (1 + N p), A Phi
};

/// Throws NumericalError when the loading matrix is rank deficient.
StructuralMatrices structural_matrices(const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& phi_stacked);
StructuralMatrices structural_matrices(const StoredDraw& draw, const DrawLayout& layout,
                                       std::optional<int> at_time = std::nullopt);

/// T x 5 quantiles of a tv loading path across draws.
Eigen::MatrixXd impact_surface(const PosteriorDraws& draws, int shock, int variable);

void write_irf_csv(const std::string& path, const IrfResult& result);
void write_irf_json(const std::string& path, const IrfResult& result);
void write_surface_csv(const std::string& path, const std::string& shock, const std::string& variable,
                       const Eigen::MatrixXd& surface, const std::vector<Month>& dates = {});

}  // namespace fbvar
