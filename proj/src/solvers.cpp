#include "corpca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corpca/error.hpp"
#include "corpca/random.hpp"

namespace corpca {

// ---------------------------------------------------------------------------
// Sensing operator and data types

SensingOperator::SensingOperator(Matrix phi)
    : matrix_(std::make_shared<const Matrix>(std::move(phi))), rows_(matrix_->rows()), cols_(matrix_->cols()) {
  if (rows_ < 1 || cols_ < 1) throw InvalidInput("SensingOperator: empty matrix");
  if (!matrix_->allFinite()) throw InvalidInput("SensingOperator: non-finite entries");
  norm_ = spectral_norm(*matrix_);
}

SensingOperator SensingOperator::gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("SensingOperator: dimensions must be positive");
  Rng rng(seed);
  return SensingOperator(randn(m, n, rng, 1.0 / std::sqrt(static_cast<double>(m))));
}

SensingOperator SensingOperator::identity(Eigen::Index n) {
  if (n < 1) throw InvalidInput("SensingOperator: dimension must be positive");
  SensingOperator op;
  op.rows_ = n;
  op.cols_ = n;
  op.norm_ = 1.0;
  return op;
}

Vector SensingOperator::apply(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != cols_) throw InvalidInput("SensingOperator: vector length does not match n");
  if (!matrix_) return x;
  return *matrix_ * x;
}

Vector SensingOperator::apply_transpose(const Eigen::Ref<const Vector>& r) const {
  if (r.size() != rows_) throw InvalidInput("SensingOperator: vector length does not match m");
  if (!matrix_) return r;
  return matrix_->transpose() * r;
}

Matrix SensingOperator::dense() const {
  if (!matrix_) return Matrix::Identity(rows_, cols_);
  return *matrix_;
}

MeasurementModel MeasurementModel::observe(const SensingOperator& phi, const Eigen::Ref<const Vector>& signal) {
  return MeasurementModel{phi, phi.apply(signal)};
}

void MeasurementModel::validate() const {
  if (n() < 1) throw InvalidInput("MeasurementModel: missing sensing operator");
  if (y.size() != m()) throw InvalidInput("MeasurementModel: y length does not match Phi rows");
  if (m() > n()) throw InvalidInput("MeasurementModel: more measurements than unknowns");
  if (!y.allFinite()) throw InvalidInput("MeasurementModel: non-finite measurements");
}

LowRankPrior LowRankPrior::from_matrix(const Matrix& B) {
  if (B.cols() == 0) return empty(B.rows());
  return LowRankPrior{B, compact(thin_svd(B), 1e-12)};
}

LowRankPrior LowRankPrior::empty(Eigen::Index n) {
  return LowRankPrior{Matrix(n, 0), ThinSvd{Matrix(n, 0), Vector(0), Matrix(0, 0)}};
}

void LowRankPrior::validate() const {
  if (svd.U.rows() != B.rows() || svd.V.rows() != B.cols())
    throw InvalidInput("LowRankPrior: factor shapes do not match B");
  if (svd.U.cols() != svd.S.size() || svd.V.cols() != svd.S.size())
    throw InvalidInput("LowRankPrior: inconsistent factor ranks");
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("SolverConfig: epsilon must lie in (0, 1)");
  if (!(tol >= 0.0)) throw InvalidInput("SolverConfig: tol must be nonnegative");
  if (max_iter < 1) throw InvalidInput("SolverConfig: max_iter must be positive");
  if (!(mu_bar_ratio > 0.0) && !(mu_bar > 0.0)) throw InvalidInput("SolverConfig: mu_bar must be positive");
  if (!(mu_warm_scale > 0.0)) throw InvalidInput("SolverConfig: mu_warm_scale must be positive");
  if (!std::isfinite(lambda) || !std::isfinite(step)) throw InvalidInput("SolverConfig: non-finite parameter");
}

// ---------------------------------------------------------------------------
// Shared pieces of the two proximal-gradient solvers

namespace {

struct Schedule {
  double lambda;
  double step;
  double mu0;
  double mu_bar;
};

Schedule resolve_schedule(const SolverConfig& cfg, const SensingOperator& phi, const Eigen::Ref<const Vector>& y,
                          double lipschitz_factor) {
  Schedule s{};
  const auto n = static_cast<double>(phi.cols());
  s.lambda = cfg.lambda > 0.0 ? cfg.lambda : 1.0 / std::sqrt(n);
  if (cfg.step > 0.0)
    s.step = cfg.step;
  else if (cfg.step_policy == StepPolicy::Literal)
    s.step = 0.5;
  else
    s.step = 1.0 / (lipschitz_factor * phi.norm() * phi.norm());

  // First sparse threshold step * mu0 * lambda equals 0.99 |Phi^T y|_inf.
  double warm = cfg.mu_warm_scale * phi.apply_transpose(y).lpNorm<Eigen::Infinity>() / (s.step * s.lambda);
  if (!(warm > 0.0)) warm = cfg.mu_warm_scale;
  s.mu_bar = cfg.mu_bar > 0.0 ? cfg.mu_bar : cfg.mu_bar_ratio * warm;
  s.mu0 = cfg.mu_policy == MuPolicy::Warm ? std::max(warm, s.mu_bar) : 0.0;
  return s;
}

// Squared distance from -grad to mu*lambda*[lo, hi], summed over coordinates:
// the minimal-norm element of grad + mu*lambda*dg(x).
double min_norm_subgradient_sq(const Vector& grad, const Eigen::Ref<const Vector>& x, const SideInfoSet& si,
                               double scale) {
  Vector lo, hi;
  nl1_subdifferential(x, si, lo, hi);
  double total = 0.0;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double a = grad(i) + scale * lo(i);
    const double b = grad(i) + scale * hi(i);
    double r = 0.0;
    if (a > 0.0)
      r = a;
    else if (b < 0.0)
      r = b;
    total += r * r;
  }
  return total;
}

double next_xi(double xi) { return (1.0 + std::sqrt(1.0 + 4.0 * xi * xi)) / 2.0; }

}  // namespace

Vector data_gradient(const MeasurementModel& meas, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v) {
  return meas.phi.apply_transpose(meas.phi.apply(x + v) - meas.y);
}

double corpca_objective(const MeasurementModel& meas, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& v, const SideInfoSet& si, const LowRankPrior& prior,
                        double lambda, double mu) {
  const double fit = 0.5 * (meas.phi.apply(x + v) - meas.y).squaredNorm();
  const double nuclear = inc_svd(prior.svd, v).nuclear_norm();
  return fit + lambda * mu * nl1_penalty(x, si) + mu * nuclear;
}

// ---------------------------------------------------------------------------
// CORPCA inner loop

CorpcaIteration::CorpcaIteration(const MeasurementModel& meas, SideInfoSet si, const LowRankPrior& prior,
                                 const SolverConfig& cfg)
    : meas_(meas), si_(std::move(si)), prior_(prior), cfg_(cfg) {
  cfg_.validate();
  meas_.validate();
  si_.validate();
  prior_.validate();
  const Eigen::Index n = meas_.n();
  if (si_.dim() != n) throw InvalidInput("corpca_step: side information dimension does not match Phi columns");
  if (prior_.n() != n) throw InvalidInput("corpca_step: low-rank prior rows do not match Phi columns");

  const Schedule s = resolve_schedule(cfg_, meas_.phi, meas_.y, 2.0);
  lambda_ = s.lambda;
  step_ = s.step;
  mu_bar_ = s.mu_bar;
  state_.x_prev = state_.x_cur = Vector::Zero(n);
  state_.v_prev = state_.v_cur = Vector::Zero(n);
  state_.mu = s.mu0;
  si_used_ = si_;
}

bool CorpcaIteration::step() {
  SolverState& st = state_;
  const double a = (st.xi_prev - 1.0) / st.xi_cur;
  const Vector xt = st.x_cur + a * (st.x_cur - st.x_prev);
  const Vector vt = st.v_cur + a * (st.v_cur - st.v_prev);
  const Vector grad = data_gradient(meas_, xt, vt);
  const double mu = st.mu;

  Vector v_next;
  Vector v_target;
  if (cfg_.update_low_rank) {
    v_target = vt - step_ * grad;
    last_svd_ = shrink(inc_svd(prior_.svd, v_target), step_ * mu);
    // Last column of U Gamma(S) V^T.
    const Eigen::Index last = last_svd_.V.rows() - 1;
    v_next = last_svd_.U * last_svd_.S.cwiseProduct(last_svd_.V.row(last).transpose());
  } else {
    v_next = Vector::Zero(xt.size());
  }
  Vector x_next = prox_nl1(xt - step_ * grad, si_, step_ * mu * lambda_);

  if (!x_next.allFinite() || !v_next.allFinite())
    throw DivergenceError("corpca_step: non-finite iterate", st.k);

  // Stopping rule on the minimal-norm subgradient of H at the new point,
  // with the weights that produced it.
  const Vector grad_new = data_gradient(meas_, x_next, v_next);
  double res = min_norm_subgradient_sq(grad_new, x_next, si_, mu * lambda_);
  if (cfg_.update_low_rank) res += ((v_target - v_next) / step_ + grad_new).squaredNorm();
  if (!std::isfinite(res)) throw DivergenceError("corpca_step: non-finite objective", st.k);
  residual_ = res;
  si_used_ = si_;
  mu_used_ = mu;
  const double scale = x_next.squaredNorm() + v_next.squaredNorm();
  const bool at_floor = mu >= mu_bar_ && (cfg_.mu_policy == MuPolicy::Literal || mu <= mu_bar_);
  converged_ = at_floor && res < cfg_.tol * scale;

  if (cfg_.weights == WeightMode::Adaptive) si_ = update_weights(x_next, si_, cfg_.epsilon);

  const double xi_next = next_xi(st.xi_cur);
  st.xi_prev = st.xi_cur;
  st.xi_cur = xi_next;
  st.mu = std::max(cfg_.epsilon * mu, mu_bar_);
  st.x_prev = std::move(st.x_cur);
  st.x_cur = std::move(x_next);
  st.v_prev = std::move(st.v_cur);
  st.v_cur = std::move(v_next);
  ++st.k;
  return converged_;
}

void CorpcaIteration::run() {
  while (state_.k < cfg_.max_iter) {
    if (step()) break;
  }
}

SeparationResult CorpcaIteration::result() const {
  SeparationResult r;
  r.x_hat = state_.x_cur;
  r.v_hat = state_.v_cur;
  r.iterations = state_.k;
  r.converged = converged_;
  r.mu = mu_used_;
  r.objective = corpca_objective(meas_, r.x_hat, r.v_hat, si_used_, prior_, lambda_, mu_used_);
  if (!std::isfinite(r.objective)) throw DivergenceError("corpca_step: non-finite objective", state_.k);
  return r;
}

StepOutput CorpcaIteration::finish() const {
  StepOutput out;
  out.result = result();

  // Z_t: drop the oldest prior, append the new estimate as z_J.
  std::vector<Vector> priors = si_.priors;
  if (!priors.empty()) {
    std::rotate(priors.begin(), priors.begin() + 1, priors.end());
    priors.back() = out.result.x_hat;
  }
  if (cfg_.weights == WeightMode::Frozen) {
    out.side_info = si_;
    out.side_info.priors = std::move(priors);
  } else {
    out.side_info = SideInfoSet::with_priors(std::move(priors), meas_.n());
  }

  // B_t = U_t(:, 1:d) Gamma(S_t)(1:d): same Gram matrix, hence the same
  // [B v] spectrum, as the n x (d+1) truncation U_d Gamma(S_d) V_d^T.
  if (!cfg_.update_low_rank || prior_.d() == 0 || state_.k == 0) {
    out.prior = prior_;
    return out;
  }
  const Eigen::Index d = prior_.d();
  const Eigen::Index n = meas_.n();
  const Eigen::Index keep = std::min<Eigen::Index>(d, last_svd_.rank());
  ThinSvd svd{last_svd_.U.leftCols(keep), last_svd_.S.head(keep), Matrix::Identity(d, keep)};
  Matrix B = Matrix::Zero(n, d);
  B.leftCols(keep) = svd.U * svd.S.asDiagonal();
  if (orthonormality_error(svd.U) > 1e-6) {
    out.prior = LowRankPrior::from_matrix(B);
  } else {
    out.prior = LowRankPrior{std::move(B), std::move(svd)};
  }
  return out;
}

StepOutput corpca_step(const MeasurementModel& meas, const SideInfoSet& si, const LowRankPrior& prior,
                       const SolverConfig& cfg) {
  CorpcaIteration it(meas, si, prior, cfg);
  it.run();
  return it.finish();
}

SeparationResult OnlineSeparator::process(const MeasurementModel& meas) {
  StepOutput out = corpca_step(meas, si_, prior_, cfg_);
  si_ = std::move(out.side_info);
  prior_ = std::move(out.prior);
  return out.result;
}

// ---------------------------------------------------------------------------
// Sparse-only solver

Vector ramsia_solve(const Eigen::Ref<const Vector>& y, const SensingOperator& phi, const SideInfoSet& si_in,
                    const SolverConfig& cfg) {
  cfg.validate();
  si_in.validate();
  if (y.size() != phi.rows()) throw InvalidInput("ramsia_solve: y length does not match Phi rows");
  if (si_in.dim() != phi.cols()) throw InvalidInput("ramsia_solve: side information dimension does not match Phi");
  if (!y.allFinite()) throw InvalidInput("ramsia_solve: non-finite measurements");

  const Schedule s = resolve_schedule(cfg, phi, y, 1.0);
  const Eigen::Index n = phi.cols();
  SideInfoSet si = si_in;
  Vector x_prev = Vector::Zero(n);
  Vector x = Vector::Zero(n);
  double xi_prev = 1.0;
  double xi = 1.0;
  double mu = s.mu0;

  for (int k = 0; k < cfg.max_iter; ++k) {
    const double a = (xi_prev - 1.0) / xi;
    const Vector xt = x + a * (x - x_prev);
    const Vector grad = phi.apply_transpose(phi.apply(xt) - y);
    Vector x_next = prox_nl1(xt - s.step * grad, si, s.step * mu * s.lambda);
    if (!x_next.allFinite()) throw DivergenceError("ramsia_solve: non-finite iterate", k);

    const Vector grad_new = phi.apply_transpose(phi.apply(x_next) - y);
    const double res = min_norm_subgradient_sq(grad_new, x_next, si, mu * s.lambda);
    const bool at_floor = mu >= s.mu_bar && (cfg.mu_policy == MuPolicy::Literal || mu <= s.mu_bar);
    const bool done = at_floor && res < cfg.tol * x_next.squaredNorm();

    if (cfg.weights == WeightMode::Adaptive) si = update_weights(x_next, si, cfg.epsilon);
    const double xi_next = next_xi(xi);
    xi_prev = xi;
    xi = xi_next;
    mu = std::max(cfg.epsilon * mu, s.mu_bar);
    x_prev = std::move(x);
    x = std::move(x_next);
    if (done) break;
  }
  return x;
}

}  // namespace corpca
