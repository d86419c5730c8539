#include "fbvar/diagnostics.hpp"

#include "fbvar/error.hpp"
#include "fbvar/irf.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace fbvar {

namespace {

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double variance_of(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return x.size() > 1 ? s / (x.size() - 1) : 0.0;
}

}  // namespace

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double mu = mean_of(x);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mu) * (x[t + lag] - mu);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);

  double tau = -1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, previous);
    tau += 2.0 * pair;
    previous = pair;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) len = std::min(len, c.size() / 2);
  if (chains.empty() || len < 2) throw ValidationError("split R-hat needs at least 4 draws per chain");
  for (const auto& c : chains) {
    const std::size_t off = c.size() - 2 * len;  // drop the oldest draws of odd-length chains
    halves.emplace_back(c.begin() + off, c.begin() + off + len);
    halves.emplace_back(c.begin() + off + len, c.begin() + off + 2 * len);
  }
  const double n = static_cast<double>(len);
  std::vector<double> means;
  double W = 0.0;
  for (const auto& h : halves) {
    means.push_back(mean_of(h));
    W += variance_of(h, means.back());
  }
  W /= halves.size();
  const double B = n * variance_of(means, mean_of(means));
  if (!(W > 0.0)) return B > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double var_plus = (n - 1.0) / n * W + B / n;
  return std::sqrt(var_plus / W);
}

DiagnosticsReport diagnose(const std::vector<PosteriorDraws>& chains, int identified,
                           const std::vector<std::string>& variables, const std::vector<std::string>& shocks) {
  if (chains.empty() || chains.front().size() == 0) throw IntegrityError("no draws to diagnose");
  const auto& l = chains.front().layout;
  std::size_t len = chains.front().size();
  for (const auto& c : chains) {
    if (c.layout.N != l.N || c.layout.r != l.r || c.layout.p != l.p || c.layout.T != l.T)
      throw ValidationError("chains have different layouts");
    len = std::min(len, c.size());
  }

  DiagnosticsReport rep;
  rep.chains = chains.size();
  rep.draws = len;
  for (const auto& c : chains) rep.truncated = rep.truncated || c.truncated;
  auto var_name = [&](int i) {
    return static_cast<std::size_t>(i) < variables.size() ? variables[static_cast<std::size_t>(i)]
                                                          : "y" + std::to_string(i + 1);
  };
  auto shock_name = [&](int j) {
    return static_cast<std::size_t>(j) < shocks.size() ? shocks[static_cast<std::size_t>(j)]
                                                       : "shock" + std::to_string(j + 1);
  };

  auto add = [&](const std::string& name, auto&& extract, bool with_rhat) {
    std::vector<std::vector<double>> per_chain;
    std::vector<double> pooled;
    double ess = 0.0;
    for (const auto& c : chains) {
      std::vector<double> s(len);
      for (std::size_t d = 0; d < len; ++d) s[d] = extract(c.draws[d]);
      ess += effective_sample_size(s);
      pooled.insert(pooled.end(), s.begin(), s.end());
      per_chain.push_back(std::move(s));
    }
    SeriesDiagnostic sd;
    sd.name = name;
    sd.mean = mean_of(pooled);
    sd.sd = std::sqrt(variance_of(pooled, sd.mean));
    sd.ess = ess;
    if (with_rhat && len >= 4) sd.rhat = split_rhat(per_chain);
    rep.series.push_back(std::move(sd));
  };

  for (int i = 0; i < l.N; ++i)
    for (int j = 0; j < l.r; ++j) {
      const double first = chains.front().draws.front().loadings(i, j);
      bool pinned = first == 0.0;
      for (std::size_t d = 0; pinned && d < len; ++d) pinned = chains.front().draws[d].loadings(i, j) == 0.0;
      if (pinned) continue;
      add("loading[" + var_name(i) + "," + shock_name(j) + "]", [&](const StoredDraw& d) { return d.loadings(i, j); },
          j < identified);
    }
  for (int i = 0; i < l.m; ++i)
    add("w[" + var_name(i) + "]", [&](const StoredDraw& d) { return d.w[i]; }, false);
  for (int i = 0; i < l.n(); ++i) {
    if (l.features.stoch_vol)
      add("omega2[" + var_name(l.m + i) + "]", [&](const StoredDraw& d) { return d.omega2[i]; }, false);
    else
      add("sigma2[" + var_name(l.m + i) + "]", [&](const StoredDraw& d) { return d.macro_var(i, 0); }, false);
    if (l.features.student_t)
      add("dof[" + var_name(l.m + i) + "]", [&](const StoredDraw& d) { return d.dof[i]; }, false);
  }
  for (std::size_t c = 0; c < l.tv_coefs.size(); ++c)
    add("q[" + var_name(l.tv_coefs[c].first) + "," + shock_name(l.tv_coefs[c].second) + "]",
        [&](const StoredDraw& d) { return d.q[static_cast<Eigen::Index>(c)]; }, false);
  add("spectral_radius", [](const StoredDraw& d) { return d.spectral_radius; }, false);

  std::size_t explosive = 0, total = 0;
  double acceptance = 0.0;
  for (const auto& c : chains) {
    for (std::size_t d = 0; d < len; ++d) {
      explosive += c.draws[d].spectral_radius >= 1.0;
      ++total;
    }
    acceptance += c.draws[len - 1].dof_acceptance;
  }
  rep.explosive_share = static_cast<double>(explosive) / static_cast<double>(total);
  rep.dof_acceptance = l.features.student_t ? acceptance / chains.size() : std::numeric_limits<double>::quiet_NaN();
  if (l.features.student_t)
    for (int i = 0; i < l.n(); ++i) {
      std::vector<double> v;
      for (const auto& c : chains)
        for (std::size_t d = 0; d < len; ++d) v.push_back(c.draws[d].dof[i]);
      rep.dof_bands.push_back(band(std::move(v)));
    }
  return rep;
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsReport& report) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "series,mean,sd,ess,rhat\n");
  for (const auto& s : report.series) {
    std::fprintf(f, "\"%s\",%.10g,%.10g,%.6g,", s.name.c_str(), s.mean, s.sd, s.ess);
    if (s.rhat) std::fprintf(f, "%.6g", *s.rhat);
    std::fprintf(f, "\n");
  }
  std::fprintf(f, "\"explosive_share\",%.10g,,,\n", report.explosive_share);
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

void print_diagnostics(std::ostream& out, const DiagnosticsReport& report) {
  out << "chains: " << report.chains << ", draws per chain: " << report.draws
      << (report.truncated ? " (interrupted run)" : "") << '\n';
  out << "explosive draws: " << report.explosive_share * 100.0 << "%\n";
  double worst_rhat = 1.0, min_ess = std::numeric_limits<double>::infinity();
  for (const auto& s : report.series) {
    if (s.rhat) worst_rhat = std::max(worst_rhat, *s.rhat);
    min_ess = std::min(min_ess, s.ess);
  }
  out << "minimum ESS: " << min_ess << ", worst split R-hat (identified loadings): " << worst_rhat << '\n';
  if (!report.dof_bands.empty()) {
    out << "dof acceptance: " << report.dof_acceptance << '\n';
    for (std::size_t i = 0; i < report.dof_bands.size(); ++i)
      out << "dof[" << i << "] median " << report.dof_bands[i][2] << " (90%: " << report.dof_bands[i][0] << ", "
          << report.dof_bands[i][4] << ")\n";
  }
}

}  // namespace fbvar
