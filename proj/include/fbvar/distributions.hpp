#pragma once

#include "fbvar/random.hpp"

#include <Eigen/Dense>

#include <array>

namespace fbvar {

enum class Side { Positive, Negative };

/// Exact draw from N(mean, variance) restricted to the open half-line.
/// Uses naive rejection when the bulk lies inside the support and Robert's
/// exponential proposal in the tail; every loop is capped with an inverse-CDF
/// fallback.
double sample_truncated_normal(double mean, double variance, Side side, Rng& rng);

/// Inverse gamma with density b^a / Gamma(a) x^{-a-1} exp(-b/x); mean b/(a-1).
double sample_inverse_gamma(double shape, double scale, Rng& rng);

/// Global-local horseshoe in the auxiliary inverse-gamma form. Coefficient j
/// has prior variance error_variance * local[j] * global; `local` and `global`
/// hold squared scales, `aux_local`/`aux_global` their mixing auxiliaries.
struct HorseshoeState {
  Eigen::VectorXd local;
  double global = 1.0;
  Eigen::VectorXd aux_local;
  double aux_global = 1.0;

  static HorseshoeState initial(Eigen::Index size, double global = 1.0);
  Eigen::Index size() const { return local.size(); }
  /// Prior variance of element j (excluding any error variance factor).
  double prior_variance(Eigen::Index j) const { return local[j] * global; }
};

HorseshoeState update_horseshoe(const HorseshoeState& state, const Eigen::Ref<const Eigen::VectorXd>& coefficients,
                                double error_variance, Rng& rng);

/// Group form: local j scales `counts[j]` iid N(0, local[j] * global)
/// quantities whose sum of squares is `sum_squares[j]`. With counts of 1 this
/// is the coefficient form above.
HorseshoeState update_horseshoe_grouped(const HorseshoeState& state,
                                        const Eigen::Ref<const Eigen::VectorXd>& sum_squares,
                                        const Eigen::Ref<const Eigen::VectorXd>& counts, Rng& rng);

/// 10-component normal mixture approximation of log chi^2(1) (Omori, Chib,
/// Shephard and Nakajima, 2007): weight, mean and variance per component.
struct MixtureComponent {
  double weight;
  double mean;
  double variance;
};
inline constexpr std::array<MixtureComponent, 10> kLogChi2Mixture{{
    {0.00609, 1.92677, 0.11265},
    {0.04775, 1.34744, 0.17788},
    {0.13057, 0.73504, 0.26768},
    {0.20674, 0.02266, 0.40611},
    {0.22715, -0.85173, 0.62699},
    {0.18842, -1.97278, 0.98583},
    {0.12047, -3.46788, 1.57469},
    {0.05591, -5.55246, 2.54498},
    {0.01575, -8.68384, 4.16591},
    {0.00115, -14.65000, 7.33342},
}};
inline constexpr double kLogSquareOffset = 1e-10;

/// Posterior component probabilities for y* = log(residual^2 + offset) given
/// the log-volatility.
std::array<double, 10> logchi2_mixture_posterior(double residual, double logvol);
int sample_logchi2_mixture_indicator(double residual, double logvol, Rng& rng);

/// Student-t mixing scales: kappa_t ~ IG((nu+1)/2, (nu + e_t^2 / s_t)/2)
/// where s_t is the variance path.
Eigen::VectorXd sample_t_scales(const Eigen::Ref<const Eigen::VectorXd>& residuals,
                                const Eigen::Ref<const Eigen::VectorXd>& variance_path, double dof, Rng& rng);

/// Prior on the degrees of freedom: (nu - 2) ~ Exponential with this mean.
inline constexpr double kDofPriorMean = 10.0;

/// Log conditional density of nu given mixing scales kappa ~ IG(nu/2, nu/2),
/// up to a constant; -inf for nu <= 2.
double dof_log_conditional(double dof, const Eigen::Ref<const Eigen::VectorXd>& mixing_scales);

struct DofDraw {
  double dof;
  bool accepted;
};

/// One random-walk Metropolis step on log(nu - 2). A step size of zero makes
/// no proposal and reports no acceptance.
DofDraw sample_dof(double dof_current, const Eigen::Ref<const Eigen::VectorXd>& mixing_scales, double step, Rng& rng);

}  // namespace fbvar
