#pragma once

#include <vector>

#include "corpca/linalg.hpp"

namespace corpca {

/// Prior (side) information for the weighted n-l1 penalty
///   g(x) = sum_{j=0..J} beta_j || W_j (x - z_j) ||_1,   z_0 = 0.
///
/// `priors` holds z_1..z_J; `weights` and `beta` hold J+1 entries, index 0
/// belonging to the implicit zero prior.
struct SideInfoSet {
  std::vector<Vector> priors;
  std::vector<Vector> weights;
  Vector beta;

  /// J zero priors, unit weights and beta_j = 1/(J+1).
  static SideInfoSet uniform(Eigen::Index n, int J);
  /// Given priors, unit weights and beta_j = 1/(J+1).
  static SideInfoSet with_priors(std::vector<Vector> priors, Eigen::Index n);

  int J() const { return static_cast<int>(priors.size()); }
  Eigen::Index dim() const { return weights.empty() ? 0 : weights.front().size(); }

  /// z_ji with z_0 = 0.
  double prior_value(int j, Eigen::Index i) const { return j == 0 ? 0.0 : priors[j - 1](i); }

  /// Throws InvalidInput when sum beta != 1, sum_i w_ji != n or some w_ji <= 0.
  void validate() const;
};

/// Penalty value sum_j beta_j || W_j (x - z_j) ||_1.
double nl1_penalty(const Eigen::Ref<const Vector>& x, const SideInfoSet& si);

/// sign(x_i) max(|x_i| - tau, 0).
Vector soft_threshold(const Eigen::Ref<const Vector>& x, double tau);

/// Exact minimizer of tau * g(u) + 1/2 |u - x|^2, solved coordinate-wise on
/// the sorted breakpoints {z_ji}.
Vector prox_nl1(const Eigen::Ref<const Vector>& x, const SideInfoSet& si, double tau);

/// Scalar kernel of prox_nl1: minimizer of
///   tau * sum_k c_k |u - p_k| + 1/2 (u - x)^2
/// with c_k >= 0. `points` and `coeffs` have equal length (<= 16).
double prox_breakpoints(double x, const double* points, const double* coeffs, int count, double tau);

/// Reweighting step of the n-l1 solver:
///   w_ji   = n (|x_i - z_ji| + eps)^-1 / sum_l (|x_l - z_jl| + eps)^-1
///   beta_j = (|W_j (x - z_j)|_1 + eps)^-1 / sum_l (|W_l (x - z_l)|_1 + eps)^-1
SideInfoSet update_weights(const Eigen::Ref<const Vector>& x, const SideInfoSet& si, double eps);

/// Interval [lo_i, hi_i] of the subdifferential of g at u, per coordinate.
void nl1_subdifferential(const Eigen::Ref<const Vector>& u, const SideInfoSet& si, Vector& lo, Vector& hi);

}  // namespace corpca
