#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "corpca/linalg.hpp"
#include "corpca/proximal.hpp"

namespace corpca {

/// Linear measurement operator Phi (m x n). Copies share the matrix.
class SensingOperator {
 public:
  SensingOperator() = default;
  explicit SensingOperator(Matrix phi);

  /// Entries i.i.d. N(0, 1/m).
  static SensingOperator gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed);
  /// Phi = I_n without storing it.
  static SensingOperator identity(Eigen::Index n);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_identity() const { return !matrix_; }
  /// Largest singular value, computed on construction.
  double norm() const { return norm_; }

  Vector apply(const Eigen::Ref<const Vector>& x) const;
  Vector apply_transpose(const Eigen::Ref<const Vector>& r) const;
  /// Dense copy (materializes the identity).
  Matrix dense() const;

 private:
  std::shared_ptr<const Matrix> matrix_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  double norm_ = 0.0;
};

/// y = Phi (x + v) observed for one time instance.
struct MeasurementModel {
  SensingOperator phi;
  Vector y;

  Eigen::Index m() const { return phi.rows(); }
  Eigen::Index n() const { return phi.cols(); }

  static MeasurementModel observe(const SensingOperator& phi, const Eigen::Ref<const Vector>& signal);
  void validate() const;
};

/// Low-rank prior B (n x d) together with its compact SVD.
struct LowRankPrior {
  Matrix B;
  ThinSvd svd;

  Eigen::Index d() const { return B.cols(); }
  Eigen::Index n() const { return B.rows(); }

  static LowRankPrior from_matrix(const Matrix& B);
  /// n x 0 prior; [B v] = v.
  static LowRankPrior empty(Eigen::Index n);
  void validate() const;
};

enum class MuPolicy {
  /// mu_0 = 0.99 |Phi^T y|_inf, mu_{k+1} = max(eps mu_k, mu_bar).
  Warm,
  /// mu_0 = 0 as listed; mu_k = mu_bar for k >= 1.
  Literal,
};

enum class StepPolicy {
  /// 1/(2 |Phi|^2) for the joint (x, v) update, 1/|Phi|^2 for the sparse-only solver.
  Auto,
  /// The fixed 1/2 gradient step.
  Literal,
};

enum class WeightMode {
  /// Recompute w_ji and beta_j after every proximal step.
  Adaptive,
  /// Keep the weights handed in (l1 and l1-l1 baselines).
  Frozen,
};

struct SolverConfig {
  double lambda = 0.0;  ///< <= 0 selects 1/sqrt(n)
  double epsilon = 0.8;
  double mu_bar = 0.0;  ///< <= 0 selects mu_bar_ratio * mu_0
  double mu_bar_ratio = 3e-5;
  double mu_warm_scale = 0.99;
  MuPolicy mu_policy = MuPolicy::Warm;
  double step = 0.0;  ///< <= 0 selects by step_policy
  StepPolicy step_policy = StepPolicy::Auto;
  double tol = 1e-10;
  int max_iter = 3000;
  WeightMode weights = WeightMode::Adaptive;
  /// false pins v = 0 and leaves B untouched.
  bool update_low_rank = true;

  void validate() const;
};

/// Iterates of the accelerated proximal loop for one time instance.
struct SolverState {
  Vector x_prev, x_cur;
  Vector v_prev, v_cur;
  double xi_prev = 1.0;
  double xi_cur = 1.0;
  double mu = 0.0;
  int k = 0;
};

struct SeparationResult {
  Vector x_hat;
  Vector v_hat;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double mu = 0.0;
};

struct StepOutput {
  SeparationResult result;
  SideInfoSet side_info;
  LowRankPrior prior;
};

/// Phi^T (Phi (x + v) - y), the gradient of 1/2 |Phi (x + v) - y|^2 in x and in v.
Vector data_gradient(const MeasurementModel& meas, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v);

/// 1/2 |Phi(x+v) - y|^2 + lambda mu g(x) + mu |[B v]|_*.
double corpca_objective(const MeasurementModel& meas, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& v, const SideInfoSet& si, const LowRankPrior& prior,
                        double lambda, double mu);

/// One time instance of the online solver, exposed iteration by iteration.
class CorpcaIteration {
 public:
  CorpcaIteration(const MeasurementModel& meas, SideInfoSet si, const LowRankPrior& prior, const SolverConfig& cfg);

  /// Runs one inner iteration; returns true once the stopping rule holds.
  bool step();
  /// Iterates until convergence or max_iter.
  void run();

  const SolverState& state() const { return state_; }
  const SideInfoSet& side_info() const { return si_; }
  double lambda() const { return lambda_; }
  double step_size() const { return step_; }
  double mu_bar() const { return mu_bar_; }
  bool converged() const { return converged_; }
  /// Squared minimal-norm subgradient measured at the latest iterate.
  double residual() const { return residual_; }

  SeparationResult result() const;
  /// Z_t (J latest sparse estimates) and B_t (d largest thresholded directions).
  StepOutput finish() const;

 private:
  MeasurementModel meas_;
  SideInfoSet si_;
  SideInfoSet si_used_;
  LowRankPrior prior_;
  SolverConfig cfg_;
  double lambda_ = 0.0;
  double step_ = 0.0;
  double mu_bar_ = 0.0;
  double mu_used_ = 0.0;
  SolverState state_;
  ThinSvd last_svd_;
  bool converged_ = false;
  double residual_ = 0.0;
};

/// Separates y = Phi(x + v) given priors and returns the updated priors.
StepOutput corpca_step(const MeasurementModel& meas, const SideInfoSet& si, const LowRankPrior& prior,
                       const SolverConfig& cfg);

/// Sparse recovery with weighted n-l1 side information (FISTA with reweighting).
Vector ramsia_solve(const Eigen::Ref<const Vector>& y, const SensingOperator& phi, const SideInfoSet& si,
                    const SolverConfig& cfg);

struct PcpOptions {
  double lambda = 0.0;  ///< <= 0 selects 1/sqrt(max(n, T))
  double tol = 1e-9;
  int max_iter = 2000;
  double mu_bar_ratio = 1e-10;
  double continuation = 0.9;
};

struct PcpResult {
  Matrix L;
  Matrix S;
  int iterations = 0;
  bool converged = false;
};

/// Accelerated proximal gradient for min |L|_* + lambda |S|_1 + (1/2mu)|M - L - S|_F^2
/// with continuation mu -> mu_bar.
PcpResult batch_pcp(const Matrix& M, const PcpOptions& opts = {});

struct Bootstrap {
  LowRankPrior prior;
  SideInfoSet side_info;
};

/// Priors for the first time instance: B_0 from batch PCP of the training
/// columns, J zero sparse priors with uniform weights.
Bootstrap bootstrap_prior(const Matrix& training, int J, const PcpOptions& opts = {});

/// Owns the priors of a running sequence and feeds them through corpca_step.
class OnlineSeparator {
 public:
  OnlineSeparator(Bootstrap boot, SolverConfig cfg) : si_(std::move(boot.side_info)), prior_(std::move(boot.prior)), cfg_(cfg) {}

  SeparationResult process(const MeasurementModel& meas);

  const SideInfoSet& side_info() const { return si_; }
  const LowRankPrior& prior() const { return prior_; }

 private:
  SideInfoSet si_;
  LowRankPrior prior_;
  SolverConfig cfg_;
};

}  // namespace corpca
