#pragma once

#include <vector>

#include "corpca/linalg.hpp"

namespace corpca::bounds {

/// Values below this magnitude count as zero when measuring supports.
inline constexpr double kSupportTol = 1e-12;

/// Default rho of the noisy bounds, per method.
inline constexpr double kRhoNl1 = 0.8 / 3.0;
inline constexpr double kRhoL1L1 = 0.6 / 3.0;
inline constexpr double kRhoL1 = 0.4 / 3.0;

/// Inputs of the n-l1 measurement bound. Index 0 of every list belongs to the
/// zero prior z_0.
struct BoundInputs {
  double n = 0.0;
  std::vector<double> s;      ///< s_j = |x - z_j|_0
  std::vector<double> beta;   ///< mixture weights, sum to 1
  std::vector<Vector> w;      ///< weights on the support of x - z_j
  double eps = 0.0;
  double eta_hat = 0.0;       ///< min_j eta_j

  /// sum_j beta_j s_j
  double s_bar() const;
  /// (eps^2 / eta_hat^2) sum_j beta_j sum_i w_ji^2
  double alpha() const;
  void validate() const;
};

/// Result of compute_alpha_eta: the inputs plus the derived alpha.
struct AlphaEta {
  double alpha = 0.0;
  double eta_hat = 0.0;
  std::vector<double> eta;
  std::vector<double> s;
  BoundInputs inputs;
};

/// Oracle weights of the n-l1 penalty at the true x:
/// eta_j = n (sum_i 1/(|x_i - z_ji| + eps))^-1, w_ji = eta_j / (|x_i - z_ji| + eps).
/// `priors` are z_1..z_J; beta has J+1 entries.
AlphaEta compute_alpha_eta(const Eigen::Ref<const Vector>& x, const std::vector<Vector>& priors,
                           const std::vector<double>& beta, double eps);

/// Mixture weights beta_j proportional to (|W_j (x - z_j)|_1 + eps)^-1 with
/// oracle weights, z_0 = 0 included.
std::vector<double> oracle_beta(const Eigen::Ref<const Vector>& x, const std::vector<Vector>& priors, double eps);

/// Noiseless: 2 alpha ln(n/s_bar) + 7/5 s_bar + 1.
/// Noisy:     (2 alpha/rho) ln(n/s_bar) + 7/(5 rho) s_bar + 3/(2 rho).
double bound_nl1(const BoundInputs& inp, bool noisy = false, double rho = kRhoNl1);

/// 2 s0 ln(n/s0) + 7/5 s0 + 1.
double bound_l1(double n, double s0);

/// Side-information quality terms of the l1-l1 bound.
struct L1L1Terms {
  double s0 = 0.0;
  double xi = 0.0;     ///< |{z_i != x_i = 0}| - |{z_i = x_i != 0}|
  double h_bar = 0.0;  ///< |{x_i > 0, x_i > z_i} u {x_i < 0, x_i < z_i}|
};
L1L1Terms l1l1_terms(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z);

/// 2 h_bar ln(n/(s0 + xi/2)) + 7/5 (s0 + xi/2) + 1.
double bound_l1l1(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z);

/// Converts a noiseless bound U_g + 1 into its noisy counterpart (U_g + 3/2)/rho.
double to_noisy(double noiseless, double rho);

}  // namespace corpca::bounds
