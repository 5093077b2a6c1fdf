#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corpca/error.hpp"
#include "corpca/proximal.hpp"
#include "corpca/random.hpp"

using namespace corpca;

namespace {

double scalar_objective(double u, double x, const std::vector<double>& p, const std::vector<double>& c, double tau) {
  double g = 0.0;
  for (size_t k = 0; k < p.size(); ++k) g += c[k] * std::abs(u - p[k]);
  return tau * g + 0.5 * (u - x) * (u - x);
}

// Dense grid search refined twice around the incumbent.
double brute_force_minimizer(double x, const std::vector<double>& p, const std::vector<double>& c, double tau) {
  double lo = x;
  double hi = x;
  for (double q : p) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  lo -= 1.0;
  hi += 1.0;
  double best = lo;
  for (double h : {1e-3, 1e-5, 1e-7}) {
    double best_f = scalar_objective(best, x, p, c, tau);
    for (double u = lo; u <= hi; u += h) {
      const double f = scalar_objective(u, x, p, c, tau);
      if (f < best_f) {
        best_f = f;
        best = u;
      }
    }
    lo = best - 2.0 * h;
    hi = best + 2.0 * h;
  }
  return best;
}

SideInfoSet one_prior(const Vector& z, const Vector& w0, const Vector& w1, double b0) {
  SideInfoSet si;
  si.priors = {z};
  si.weights = {w0, w1};
  si.beta = Vector(2);
  si.beta << b0, 1.0 - b0;
  return si;
}

}  // namespace

TEST(SoftThreshold, Examples) {
  Vector x(4);
  x << 3.0, -0.5, 1.0, -2.0;
  Vector want(4);
  want << 2.0, 0.0, 0.0, -1.0;
  EXPECT_EQ(soft_threshold(x, 1.0), want);
  EXPECT_EQ(soft_threshold(x, 0.0), x);
}

TEST(SideInfoSet, UniformAndValidate) {
  const SideInfoSet si = SideInfoSet::uniform(5, 3);
  EXPECT_EQ(si.J(), 3);
  EXPECT_EQ(si.dim(), 5);
  EXPECT_NEAR(si.beta.sum(), 1.0, 1e-15);
  EXPECT_NO_THROW(si.validate());

  SideInfoSet bad = si;
  bad.beta(0) += 0.1;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = si;
  bad.weights[1](2) = 0.0;
  bad.weights[1](3) = 2.0;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = si;
  bad.weights[2](0) = 1.5;
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Nl1Penalty, HandComputed) {
  Vector z(3);
  z << 1.0, 0.0, -1.0;
  Vector w0(3), w1(3);
  w0 << 1.0, 1.0, 1.0;
  w1 << 0.5, 1.5, 1.0;
  const SideInfoSet si = one_prior(z, w0, w1, 0.25);
  Vector x(3);
  x << 2.0, -1.0, 0.0;
  // 0.25 (2 + 1 + 0) + 0.75 (0.5*1 + 1.5*1 + 1*1)
  EXPECT_NEAR(nl1_penalty(x, si), 0.75 + 2.25, 1e-14);
}

TEST(ProxNl1, NoPriorsIsSoftThreshold) {
  Rng rng(11);
  const Vector x = randn(50, rng);
  const SideInfoSet si = SideInfoSet::uniform(50, 0);
  EXPECT_LT((prox_nl1(x, si, 0.3) - soft_threshold(x, 0.3)).norm(), 1e-15);
}

TEST(ProxNl1, ScalarExamples) {
  // tau (|u| + |u - 2|)/2 + (u - x)^2/2: flat region between the breakpoints.
  const double p[] = {0.0, 2.0};
  const double c[] = {0.5, 0.5};
  EXPECT_NEAR(prox_breakpoints(1.0, p, c, 2, 10.0), 1.0, 1e-15);
  EXPECT_NEAR(prox_breakpoints(5.0, p, c, 2, 1.0), 4.0, 1e-15);
  EXPECT_NEAR(prox_breakpoints(-3.0, p, c, 2, 1.0), -2.0, 1e-15);
  EXPECT_NEAR(prox_breakpoints(2.3, p, c, 2, 1.0), 2.0, 1e-15);
}

TEST(ProxNl1, MatchesBruteForceOnRandomScalars) {
  Rng rng(12);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const int k = count(rng);
    std::vector<double> p(k), c(k);
    for (int j = 0; j < k; ++j) {
      p[j] = j == 0 ? 0.0 : 2.0 * normal(rng);
      c[j] = unit(rng);
    }
    const double x = 3.0 * normal(rng);
    const double tau = 2.0 * unit(rng);
    const double got = prox_breakpoints(x, p.data(), c.data(), k, tau);
    const double want = brute_force_minimizer(x, p, c, tau);
    EXPECT_NEAR(got, want, 1e-4) << "trial " << trial;
    EXPECT_LE(scalar_objective(got, x, p, c, tau), scalar_objective(want, x, p, c, tau) + 1e-12);
  }
}

TEST(ProxNl1, SubgradientConditionHolds) {
  Rng rng(13);
  const Eigen::Index n = 40;
  for (int trial = 0; trial < 10; ++trial) {
    SideInfoSet si = SideInfoSet::uniform(n, 3);
    for (auto& z : si.priors) z = randn(n, rng);
    si = update_weights(randn(n, rng), si, 0.5);
    const Vector x = 2.0 * randn(n, rng);
    const double tau = 0.7;
    const Vector u = prox_nl1(x, si, tau);
    for (Eigen::Index i = 0; i < n; ++i) {
      // Interval of d/du sum_j beta_j w_ji |u - z_ji| evaluated independently.
      double lo = 0.0;
      double hi = 0.0;
      for (int j = 0; j <= si.J(); ++j) {
        const double c = si.beta(j) * si.weights[j](i);
        const double d = u(i) - si.prior_value(j, i);
        if (std::abs(d) < 1e-12) {
          lo -= c;
          hi += c;
        } else {
          lo += d > 0 ? c : -c;
          hi += d > 0 ? c : -c;
        }
      }
      const double r = (x(i) - u(i)) / tau;
      EXPECT_GE(r, lo - 1e-9);
      EXPECT_LE(r, hi + 1e-9);
    }
  }
}

TEST(UpdateWeights, SpecExample) {
  // n = 3, x - z = (1, 0, 0), eps = 1: w = 3 (1/2, 1, 1) / (5/2).
  Vector z = Vector::Zero(3);
  Vector x(3);
  x << 1.0, 0.0, 0.0;
  SideInfoSet si = SideInfoSet::with_priors({z}, 3);
  const SideInfoSet out = update_weights(x, si, 1.0);
  EXPECT_NEAR(out.weights[1](0), 0.6, 1e-12);
  EXPECT_NEAR(out.weights[1](1), 1.2, 1e-12);
  EXPECT_NEAR(out.weights[1](2), 1.2, 1e-12);
  EXPECT_NEAR(out.weights[1].sum(), 3.0, 1e-12);
}

TEST(UpdateWeights, PerfectPriorIsUniform) {
  Rng rng(14);
  const Vector x = randn(8, rng);
  const SideInfoSet out = update_weights(x, SideInfoSet::with_priors({x}, 8), 0.8);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(out.weights[1](i), 1.0, 1e-12);
}

TEST(UpdateWeights, InvariantsOnRandomInputs) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 5 + trial;
    std::vector<Vector> priors;
    for (int j = 0; j < trial % 4; ++j) priors.push_back(randn(n, rng));
    const SideInfoSet out = update_weights(randn(n, rng), SideInfoSet::with_priors(priors, n), 0.8);
    EXPECT_NEAR(out.beta.sum(), 1.0, 1e-9);
    for (const Vector& w : out.weights) {
      EXPECT_NEAR(w.sum(), static_cast<double>(n), 1e-9);
      EXPECT_GT(w.minCoeff(), 0.0);
    }
    EXPECT_NO_THROW(out.validate());
  }
}

TEST(UpdateWeights, BetaFollowsWeightedDistance) {
  Vector z(2);
  z << 1.0, 1.0;
  Vector x(2);
  x << 1.0, 1.0;
  const SideInfoSet out = update_weights(x, SideInfoSet::with_priors({z}, 2), 0.5);
  // |W_0 x|_1 = 2 with uniform w_0, |W_1 (x - z)|_1 = 0.
  const double b0 = 1.0 / 2.5;
  const double b1 = 1.0 / 0.5;
  EXPECT_NEAR(out.beta(0), b0 / (b0 + b1), 1e-12);
  EXPECT_NEAR(out.beta(1), b1 / (b0 + b1), 1e-12);
}

TEST(UpdateWeights, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(update_weights(Vector::Ones(3), SideInfoSet::uniform(3, 1), 0.0), InvalidInput);
}
