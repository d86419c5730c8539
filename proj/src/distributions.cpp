#include "fbvar/distributions.hpp"

#include "fbvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fbvar {

namespace {

constexpr int kMaxRejections = 256;

double upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Inverse-CDF draw of z | z > a, by bisection on the upper tail probability.
double tail_by_inversion(double a, Rng& rng) {
  const double qa = upper_tail(a);
  if (!(qa > 0.0)) {
    // Beyond double range the conditional is exponential with rate a to
    // leading order.
    return a - std::log(uniform01(rng)) / a;
  }
  const double target = qa * uniform01(rng);
  double lo = a, hi = a + 1.0;
  while (upper_tail(hi) > target) hi += 1.0 + (hi - a);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (upper_tail(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// z ~ N(0, 1) conditioned on z > a.
double standard_lower_truncated(double a, Rng& rng) {
  if (a <= 0.45) {
    for (int i = 0; i < kMaxRejections; ++i) {
      const double z = std_normal(rng);
      if (z > a) return z;
    }
    return tail_by_inversion(a, rng);
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (int i = 0; i < kMaxRejections; ++i) {
    const double z = a - std::log(uniform01(rng)) / alpha;
    const double d = z - alpha;
    if (uniform01(rng) <= std::exp(-0.5 * d * d)) return z;
  }
  return tail_by_inversion(a, rng);
}

}  // namespace

double sample_truncated_normal(double mean, double variance, Side side, Rng& rng) {
  if (!std::isfinite(mean) || !std::isfinite(variance))
    throw ValidationError("truncated normal: non-finite mean or variance");
  if (!(variance > 0.0)) throw ValidationError("truncated normal: variance must be positive");
  const double sd = std::sqrt(variance);
  const double m = side == Side::Positive ? mean : -mean;
  double x = m + sd * standard_lower_truncated(-m / sd, rng);
  if (!(x > 0.0)) x = std::numeric_limits<double>::denorm_min();
  return side == Side::Positive ? x : -x;
}

double sample_inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
    throw ValidationError("inverse gamma: shape and scale must be positive and finite (got " +
                          std::to_string(shape) + ", " + std::to_string(scale) + ")");
  std::gamma_distribution<double> gamma(shape, 1.0);
  double g = gamma(rng);
  if (!(g > 0.0)) g = std::numeric_limits<double>::min();
  return scale / g;
}

// ---------------------------------------------------------------- horseshoe

namespace {

// Given fixed coefficients the local and global scales can trade off without
// bound; clamping keeps the reciprocals in the auxiliary updates finite.
constexpr double kScaleFloor = 1e-150, kScaleCeiling = 1e150;

double bounded(double v) { return std::clamp(v, kScaleFloor, kScaleCeiling); }

}  // namespace

HorseshoeState HorseshoeState::initial(Eigen::Index size, double global) {
  HorseshoeState s;
  s.local = Eigen::VectorXd::Ones(size);
  s.aux_local = Eigen::VectorXd::Ones(size);
  s.global = global;
  s.aux_global = 1.0;
  return s;
}

HorseshoeState update_horseshoe_grouped(const HorseshoeState& state,
                                        const Eigen::Ref<const Eigen::VectorXd>& sum_squares,
                                        const Eigen::Ref<const Eigen::VectorXd>& counts, Rng& rng) {
  const auto k = state.size();
  if (sum_squares.size() != k || counts.size() != k) throw ValidationError("horseshoe: size mismatch");
  HorseshoeState out = state;
  // Locals, then their auxiliaries.
  for (Eigen::Index j = 0; j < k; ++j) {
    out.local[j] = bounded(sample_inverse_gamma(0.5 * (1.0 + counts[j]),
                                                1.0 / out.aux_local[j] + 0.5 * sum_squares[j] / out.global, rng));
    out.aux_local[j] = bounded(sample_inverse_gamma(1.0, 1.0 + 1.0 / out.local[j], rng));
  }
  double total_count = 0.0, weighted = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    total_count += counts[j];
    weighted += sum_squares[j] / out.local[j];
  }
  out.global = bounded(sample_inverse_gamma(0.5 * (1.0 + total_count), 1.0 / out.aux_global + 0.5 * weighted, rng));
  out.aux_global = bounded(sample_inverse_gamma(1.0, 1.0 + 1.0 / out.global, rng));
  return out;
}

HorseshoeState update_horseshoe(const HorseshoeState& state, const Eigen::Ref<const Eigen::VectorXd>& coefficients,
                                double error_variance, Rng& rng) {
  if (!(error_variance > 0.0)) throw ValidationError("horseshoe: error variance must be positive");
  if (!coefficients.allFinite()) throw ValidationError("horseshoe: coefficients must be finite");
  const Eigen::VectorXd ss = coefficients.array().square() / error_variance;
  return update_horseshoe_grouped(state, ss, Eigen::VectorXd::Ones(coefficients.size()), rng);
}

// ---------------------------------------------------------------- log chi^2 mixture

std::array<double, 10> logchi2_mixture_posterior(double residual, double logvol) {
  const double y = std::log(residual * residual + kLogSquareOffset) - logvol;
  std::array<double, 10> logw{};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kLogChi2Mixture.size(); ++k) {
    const auto& c = kLogChi2Mixture[k];
    const double d = y - c.mean;
    logw[k] = std::log(c.weight) - 0.5 * std::log(c.variance) - 0.5 * d * d / c.variance;
    best = std::max(best, logw[k]);
  }
  double total = 0.0;
  for (auto& w : logw) {
    w = std::exp(w - best);
    total += w;
  }
  for (auto& w : logw) w /= total;
  return logw;
}

int sample_logchi2_mixture_indicator(double residual, double logvol, Rng& rng) {
  const auto post = logchi2_mixture_posterior(residual, logvol);
  const double u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t k = 0; k < post.size(); ++k) {
    cum += post[k];
    if (u <= cum) return static_cast<int>(k);
  }
  return static_cast<int>(post.size()) - 1;
}

// ---------------------------------------------------------------- Student-t

Eigen::VectorXd sample_t_scales(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                                const Eigen::Ref<const Eigen::VectorXd>& variance_path, double dof, Rng& rng) {
  if (!(dof > 2.0)) throw ValidationError("t scales: dof must exceed 2");
  if (residuals.size() != variance_path.size()) throw ValidationError("t scales: size mismatch");
  Eigen::VectorXd out(residuals.size());
  for (Eigen::Index t = 0; t < residuals.size(); ++t) {
    if (!(variance_path[t] > 0.0)) throw ValidationError("t scales: nonpositive variance at t=" + std::to_string(t));
    const double z2 = residuals[t] * residuals[t] / variance_path[t];
    out[t] = sample_inverse_gamma(0.5 * (dof + 1.0), 0.5 * (dof + z2), rng);
  }
  return out;
}

double dof_log_conditional(double dof, const Eigen::Ref<const Eigen::VectorXd>& mixing_scales) {
  if (!(dof > 2.0)) return -std::numeric_limits<double>::infinity();
  const double half = 0.5 * dof;
  const auto n = static_cast<double>(mixing_scales.size());
  double sum_log = 0.0, sum_inv = 0.0;
  for (Eigen::Index t = 0; t < mixing_scales.size(); ++t) {
    sum_log += std::log(mixing_scales[t]);
    sum_inv += 1.0 / mixing_scales[t];
  }
  return -(dof - 2.0) / kDofPriorMean + n * (half * std::log(half) - std::lgamma(half)) -
         (half + 1.0) * sum_log - half * sum_inv;
}

DofDraw sample_dof(double dof_current, const Eigen::Ref<const Eigen::VectorXd>& mixing_scales, double step, Rng& rng) {
  if (!(dof_current > 2.0)) throw ValidationError("dof must exceed 2");
  if (!(step > 0.0)) return {dof_current, false};
  const double x = std::log(dof_current - 2.0);
  const double x_new = x + step * std_normal(rng);
  const double dof_new = 2.0 + std::exp(x_new);
  // Jacobian of nu = 2 + exp(x) contributes x on the log scale.
  const double log_ratio = dof_log_conditional(dof_new, mixing_scales) + x_new -
                           dof_log_conditional(dof_current, mixing_scales) - x;
  if (std::isfinite(dof_new) && std::log(uniform01(rng)) < log_ratio) return {dof_new, true};
  return {dof_current, false};
}

}  // namespace fbvar
