#pragma once

#include "fbvar/gibbs.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fbvar {

/// Effective sample size from Geyer's initial monotone positive sequence of
/// autocorrelation pairs. Returns the length for a constant series.
double effective_sample_size(const std::vector<double>& series);

/// Split potential scale reduction: each chain is halved, then the usual
/// between/within variance ratio is taken over all halves.
double split_rhat(const std::vector<std::vector<double>>& chains);

struct SeriesDiagnostic {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
  std::optional<double> rhat;  // only for identified-shock loadings
};

struct DiagnosticsReport {
  std::size_t chains = 0;
  std::size_t draws = 0;  // per chain
  std::vector<SeriesDiagnostic> series;
  double explosive_share = 0.0;  // draws with spectral radius >= 1
  std::vector<std::array<double, 5>> dof_bands;  // per macro series, when Student-t
  double dof_acceptance = 0.0;
  bool truncated = false;
};

/// `identified` is the number of leading shocks whose loadings get R-hat.
DiagnosticsReport diagnose(const std::vector<PosteriorDraws>& chains, int identified,
                           const std::vector<std::string>& variables = {},
                           const std::vector<std::string>& shocks = {});

void write_diagnostics_csv(const std::string& path, const DiagnosticsReport& report);
void print_diagnostics(std::ostream& out, const DiagnosticsReport& report);

}  // namespace fbvar
