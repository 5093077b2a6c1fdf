#include "corpca/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corpca/error.hpp"

namespace corpca::bounds {

double BoundInputs::s_bar() const {
  double total = 0.0;
  for (size_t j = 0; j < s.size(); ++j) total += beta[j] * s[j];
  return total;
}

double BoundInputs::alpha() const {
  double total = 0.0;
  for (size_t j = 0; j < w.size(); ++j) total += beta[j] * w[j].squaredNorm();
  return (eps * eps) / (eta_hat * eta_hat) * total;
}

void BoundInputs::validate() const {
  if (s.empty() || s.size() != beta.size() || w.size() != s.size())
    throw InvalidInput("BoundInputs: s, beta and w need one entry per prior");
  const double sum = std::accumulate(beta.begin(), beta.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("BoundInputs: beta does not sum to 1");
  for (size_t j = 0; j < s.size(); ++j) {
    if (beta[j] < 0.0) throw InvalidInput("BoundInputs: negative beta");
    if (s[j] < 0.0 || s[j] > n) throw InvalidInput("BoundInputs: support size outside [0, n]");
  }
  if (!(eta_hat > 0.0)) throw InvalidInput("BoundInputs: eta_hat must be positive");
  if (!(eps > 0.0)) throw InvalidInput("BoundInputs: eps must be positive");
}

std::vector<double> oracle_beta(const Eigen::Ref<const Vector>& x, const std::vector<Vector>& priors, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("oracle_beta: eps must be positive");
  const auto n = static_cast<double>(x.size());
  std::vector<double> inv;
  for (size_t j = 0; j <= priors.size(); ++j) {
    const Vector diff = j == 0 ? Vector(x) : Vector(x - priors[j - 1]);
    const Eigen::ArrayXd denom = diff.array().abs() + eps;
    const double eta = n / denom.inverse().sum();
    const double weighted = (eta / denom * diff.array().abs()).sum();
    inv.push_back(1.0 / (weighted + eps));
  }
  const double total = std::accumulate(inv.begin(), inv.end(), 0.0);
  for (double& b : inv) b /= total;
  return inv;
}

AlphaEta compute_alpha_eta(const Eigen::Ref<const Vector>& x, const std::vector<Vector>& priors,
                           const std::vector<double>& beta, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("compute_alpha_eta: eps must be positive");
  if (beta.size() != priors.size() + 1) throw InvalidInput("compute_alpha_eta: beta needs J+1 entries");
  const auto n = static_cast<double>(x.size());
  AlphaEta out;
  out.inputs.n = n;
  out.inputs.eps = eps;
  out.inputs.beta = beta;
  for (size_t j = 0; j <= priors.size(); ++j) {
    if (j > 0 && priors[j - 1].size() != x.size()) throw InvalidInput("compute_alpha_eta: prior length mismatch");
    const Vector diff = j == 0 ? Vector(x) : Vector(x - priors[j - 1]);
    const Eigen::ArrayXd denom = diff.array().abs() + eps;
    const double eta = n / denom.inverse().sum();
    std::vector<double> on_support;
    for (Eigen::Index i = 0; i < diff.size(); ++i)
      if (std::abs(diff(i)) > kSupportTol) on_support.push_back(eta / denom(i));
    out.eta.push_back(eta);
    out.s.push_back(static_cast<double>(on_support.size()));
    out.inputs.w.push_back(Eigen::Map<const Vector>(on_support.data(), static_cast<Eigen::Index>(on_support.size())));
  }
  out.eta_hat = *std::min_element(out.eta.begin(), out.eta.end());
  out.inputs.s = out.s;
  out.inputs.eta_hat = out.eta_hat;
  out.alpha = out.inputs.alpha();
  return out;
}

double to_noisy(double noiseless, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("rho must lie in (0, 1)");
  return (noiseless - 1.0 + 1.5) / rho;
}

double bound_nl1(const BoundInputs& inp, bool noisy, double rho) {
  inp.validate();
  const double s_bar = inp.s_bar();
  if (!(s_bar > 0.0) || s_bar >= inp.n) throw DomainError("bound_nl1: weighted support must lie in (0, n)");
  const double alpha = inp.alpha();
  const double log_term = std::log(inp.n / s_bar);
  if (!noisy) return 2.0 * alpha * log_term + 1.4 * s_bar + 1.0;
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("bound_nl1: rho must lie in (0, 1)");
  return 2.0 * alpha / rho * log_term + 7.0 / (5.0 * rho) * s_bar + 3.0 / (2.0 * rho);
}

double bound_l1(double n, double s0) {
  if (!(s0 > 0.0) || s0 >= n) throw DomainError("bound_l1: support must lie in (0, n)");
  return 2.0 * s0 * std::log(n / s0) + 1.4 * s0 + 1.0;
}

L1L1Terms l1l1_terms(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) {
  if (x.size() != z.size()) throw InvalidInput("l1l1_terms: x and z lengths differ");
  auto nonzero = [](double v) { return std::abs(v) > kSupportTol; };
  L1L1Terms t;
  double spurious = 0.0;
  double matched = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool x_on = nonzero(x(i));
    const bool same = !nonzero(x(i) - z(i));
    if (x_on) t.s0 += 1.0;
    if (!x_on && !same) spurious += 1.0;
    if (x_on && same) matched += 1.0;
    if (x_on && !same && ((x(i) > 0.0 && x(i) > z(i)) || (x(i) < 0.0 && x(i) < z(i)))) t.h_bar += 1.0;
  }
  t.xi = spurious - matched;
  return t;
}

double bound_l1l1(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) {
  const L1L1Terms t = l1l1_terms(x, z);
  const auto n = static_cast<double>(x.size());
  const double eff = t.s0 + t.xi / 2.0;
  if (!(eff > 0.0) || eff >= n) throw DomainError("bound_l1l1: s0 + xi/2 must lie in (0, n)");
  return 2.0 * t.h_bar * std::log(n / eff) + 1.4 * eff + 1.0;
}

}  // namespace corpca::bounds
