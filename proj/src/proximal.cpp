#include "corpca/proximal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "corpca/error.hpp"

namespace corpca {

namespace {
constexpr int kMaxBreakpoints = 16;
}

SideInfoSet SideInfoSet::uniform(Eigen::Index n, int J) {
  return with_priors(std::vector<Vector>(static_cast<size_t>(J), Vector::Zero(n)), n);
}

SideInfoSet SideInfoSet::with_priors(std::vector<Vector> priors, Eigen::Index n) {
  SideInfoSet si;
  const int J = static_cast<int>(priors.size());
  for (const auto& z : priors)
    if (z.size() != n) throw InvalidInput("SideInfoSet: prior length does not match n");
  si.priors = std::move(priors);
  si.weights.assign(static_cast<size_t>(J + 1), Vector::Ones(n));
  si.beta = Vector::Constant(J + 1, 1.0 / (J + 1));
  return si;
}

void SideInfoSet::validate() const {
  const int J = this->J();
  if (static_cast<int>(weights.size()) != J + 1 || beta.size() != J + 1)
    throw InvalidInput("SideInfoSet: expected J+1 weight vectors and mixture weights");
  if (J + 1 > kMaxBreakpoints) throw InvalidInput("SideInfoSet: too many priors");
  const Eigen::Index n = dim();
  for (const auto& z : priors)
    if (z.size() != n || !z.allFinite()) throw InvalidInput("SideInfoSet: malformed prior vector");
  if (std::abs(beta.sum() - 1.0) > 1e-12) throw InvalidInput("SideInfoSet: mixture weights do not sum to 1");
  if ((beta.array() < 0.0).any()) throw InvalidInput("SideInfoSet: negative mixture weight");
  for (int j = 0; j <= J; ++j) {
    const Vector& w = weights[static_cast<size_t>(j)];
    if (w.size() != n) throw InvalidInput("SideInfoSet: weight vector length does not match n");
    if (!(w.array() > 0.0).all()) throw InvalidInput("SideInfoSet: weights must be positive");
    if (std::abs(w.sum() - static_cast<double>(n)) > 1e-9 * std::max(1.0, static_cast<double>(n)))
      throw InvalidInput("SideInfoSet: weights of prior " + std::to_string(j) + " do not sum to n");
  }
}

double nl1_penalty(const Eigen::Ref<const Vector>& x, const SideInfoSet& si) {
  double total = si.beta(0) * si.weights[0].cwiseProduct(x).lpNorm<1>();
  for (int j = 1; j <= si.J(); ++j)
    total += si.beta(j) * si.weights[static_cast<size_t>(j)].cwiseProduct(x - si.priors[static_cast<size_t>(j - 1)]).lpNorm<1>();
  return total;
}

Vector soft_threshold(const Eigen::Ref<const Vector>& x, double tau) {
  if (!(tau >= 0.0)) throw InvalidInput("soft_threshold: negative threshold");
  return x.unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

double prox_breakpoints(double x, const double* points, const double* coeffs, int count, double tau) {
  std::array<std::pair<double, double>, kMaxBreakpoints> bp{};
  for (int k = 0; k < count; ++k) bp[static_cast<size_t>(k)] = {points[k], coeffs[k]};
  std::sort(bp.begin(), bp.begin() + count);

  // Merge coincident breakpoints.
  int K = 0;
  for (int k = 0; k < count; ++k) {
    if (K > 0 && bp[static_cast<size_t>(K - 1)].first == bp[static_cast<size_t>(k)].first)
      bp[static_cast<size_t>(K - 1)].second += bp[static_cast<size_t>(k)].second;
    else
      bp[static_cast<size_t>(K++)] = bp[static_cast<size_t>(k)];
  }

  double total = 0.0;
  for (int k = 0; k < K; ++k) total += bp[static_cast<size_t>(k)].second;

  // slope = sum of coefficients left of u minus those right of u.
  double slope = -total;
  for (int k = 0; k <= K; ++k) {
    const double u = x - tau * slope;
    const bool above = k == 0 || u > bp[static_cast<size_t>(k - 1)].first;
    const bool below = k == K || u < bp[static_cast<size_t>(k)].first;
    if (above && below) return u;
    if (k == K) break;
    const double p = bp[static_cast<size_t>(k)].first;
    const double next = slope + 2.0 * bp[static_cast<size_t>(k)].second;
    const double gap = x - p;
    if (gap >= tau * slope && gap <= tau * next) return p;
    slope = next;
  }

  // Rounding left no interval consistent; fall back to the best candidate.
  auto objective = [&](double u) {
    double s = 0.5 * (u - x) * (u - x);
    for (int k = 0; k < K; ++k) s += tau * bp[static_cast<size_t>(k)].second * std::abs(u - bp[static_cast<size_t>(k)].first);
    return s;
  };
  double best = x;
  double best_val = objective(x);
  for (int k = 0; k < K; ++k) {
    const double val = objective(bp[static_cast<size_t>(k)].first);
    if (val < best_val) {
      best_val = val;
      best = bp[static_cast<size_t>(k)].first;
    }
  }
  return best;
}

Vector prox_nl1(const Eigen::Ref<const Vector>& x, const SideInfoSet& si, double tau) {
  if (!(tau >= 0.0)) throw InvalidInput("prox_nl1: negative threshold");
  si.validate();
  const Eigen::Index n = x.size();
  if (si.dim() != n) throw InvalidInput("prox_nl1: side information dimension does not match x");

  const int count = si.J() + 1;
  Vector out(n);
  std::array<double, kMaxBreakpoints> points{};
  std::array<double, kMaxBreakpoints> coeffs{};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < count; ++j) {
      points[static_cast<size_t>(j)] = si.prior_value(j, i);
      coeffs[static_cast<size_t>(j)] = si.beta(j) * si.weights[static_cast<size_t>(j)](i);
    }
    out(i) = prox_breakpoints(x(i), points.data(), coeffs.data(), count, tau);
  }
  return out;
}

SideInfoSet update_weights(const Eigen::Ref<const Vector>& x, const SideInfoSet& si, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("update_weights: eps must be positive");
  const Eigen::Index n = x.size();
  const int J = si.J();
  SideInfoSet out;
  out.priors = si.priors;
  out.weights.resize(static_cast<size_t>(J + 1));
  out.beta.resize(J + 1);

  Vector inv_residual(J + 1);
  for (int j = 0; j <= J; ++j) {
    Vector diff = j == 0 ? Vector(x) : Vector(x - si.priors[static_cast<size_t>(j - 1)]);
    if (diff.size() != n) throw InvalidInput("update_weights: prior length does not match x");
    const Vector inv = (diff.array().abs() + eps).inverse().matrix();
    Vector w = static_cast<double>(n) * inv / inv.sum();
    inv_residual(j) = 1.0 / (w.cwiseProduct(diff).lpNorm<1>() + eps);
    out.weights[static_cast<size_t>(j)] = std::move(w);
  }
  out.beta = inv_residual / inv_residual.sum();
  return out;
}

void nl1_subdifferential(const Eigen::Ref<const Vector>& u, const SideInfoSet& si, Vector& lo, Vector& hi) {
  const Eigen::Index n = u.size();
  lo.setZero(n);
  hi.setZero(n);
  for (int j = 0; j <= si.J(); ++j) {
    const Vector& w = si.weights[static_cast<size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = si.beta(j) * w(i);
      const double d = u(i) - si.prior_value(j, i);
      if (d > 0.0) {
        lo(i) += c;
        hi(i) += c;
      } else if (d < 0.0) {
        lo(i) -= c;
        hi(i) -= c;
      } else {
        lo(i) -= c;
        hi(i) += c;
      }
    }
  }
}

}  // namespace corpca
