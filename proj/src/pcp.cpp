#include <algorithm>
#include <cmath>

#include "corpca/error.hpp"
#include "corpca/solvers.hpp"

namespace corpca {

namespace {

Matrix soft_threshold_matrix(const Matrix& A, double tau) {
  return A.unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

}  // namespace

PcpResult batch_pcp(const Matrix& M, const PcpOptions& opts) {
  if (M.size() == 0) throw InvalidInput("batch_pcp: empty matrix");
  if (!M.allFinite()) throw InvalidInput("batch_pcp: non-finite entries");
  if (!(opts.continuation > 0.0 && opts.continuation < 1.0)) throw InvalidInput("batch_pcp: continuation must lie in (0, 1)");
  if (opts.max_iter < 1) throw InvalidInput("batch_pcp: max_iter must be positive");

  const double lambda =
      opts.lambda > 0.0 ? opts.lambda : 1.0 / std::sqrt(static_cast<double>(std::max(M.rows(), M.cols())));

  PcpResult out;
  out.L = Matrix::Zero(M.rows(), M.cols());
  out.S = Matrix::Zero(M.rows(), M.cols());
  const double top = spectral_norm(M);
  if (top == 0.0) {
    out.converged = true;
    return out;
  }

  double mu = 0.99 * top;
  const double mu_bar = opts.mu_bar_ratio * mu;
  Matrix L_prev = out.L;
  Matrix S_prev = out.S;
  double t_prev = 1.0;
  double t = 1.0;

  for (int k = 0; k < opts.max_iter; ++k) {
    const double a = (t_prev - 1.0) / t;
    const Matrix YL = out.L + a * (out.L - L_prev);
    const Matrix YS = out.S + a * (out.S - S_prev);
    const Matrix G = YL + YS - M;

    Matrix L_next = svt(YL - 0.5 * G, 0.5 * mu);
    Matrix S_next = soft_threshold_matrix(YS - 0.5 * G, 0.5 * lambda * mu);
    if (!L_next.allFinite() || !S_next.allFinite()) throw DivergenceError("batch_pcp: non-finite iterate", k);

    // Gradient-mapping residual of the composite objective.
    const Matrix shift = L_next + S_next - YL - YS;
    const double res = std::sqrt((2.0 * (YL - L_next) + shift).squaredNorm() + (2.0 * (YS - S_next) + shift).squaredNorm());
    const double size = std::sqrt(L_next.squaredNorm() + S_next.squaredNorm());

    L_prev = std::move(out.L);
    S_prev = std::move(out.S);
    out.L = std::move(L_next);
    out.S = std::move(S_next);
    t_prev = t;
    t = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    out.iterations = k + 1;
    if (mu <= mu_bar && res <= 2.0 * opts.tol * std::max(1.0, size)) {
      out.converged = true;
      break;
    }
    mu = std::max(opts.continuation * mu, mu_bar);
  }
  return out;
}

Bootstrap bootstrap_prior(const Matrix& training, int J, const PcpOptions& opts) {
  if (J < 0) throw InvalidInput("bootstrap_prior: J must be nonnegative");
  if (training.cols() < 1) throw InvalidInput("bootstrap_prior: no training columns");
  PcpResult pcp = batch_pcp(training, opts);
  return Bootstrap{LowRankPrior::from_matrix(pcp.L), SideInfoSet::uniform(training.rows(), J)};
}

}  // namespace corpca
