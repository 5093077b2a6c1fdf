#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpca/linalg.hpp"
#include "corpca/solvers.hpp"

namespace corpca {

// ---------------------------------------------------------------------------
// Synthetic sequences

struct SynthConfig {
  Eigen::Index n = 500;
  Eigen::Index r = 5;
  Eigen::Index d = 100;  ///< training columns
  Eigen::Index q = 100;  ///< test columns
  Eigen::Index s0 = 10;
  Eigen::Index drift = -1;  ///< coordinates redrawn per step; < 0 selects s0/2
  Eigen::Index cap = 15;    ///< supports are reset to s0 once they exceed s0 + cap
  std::uint64_t seed = 0;
  bool unit_factors = false;  ///< low-rank factors of all ones

  Eigen::Index columns() const { return d + q; }
  Eigen::Index step_drift() const { return drift < 0 ? s0 / 2 : drift; }
  void validate() const;
};

struct Sequence {
  Matrix L;  ///< low-rank part, n x (d+q)
  Matrix S;  ///< sparse part, n x (d+q)

  Matrix observed() const { return L + S; }
};

/// L = U V^T with standard-normal factors; sparse columns with slowly moving
/// support (s0/2 coordinates redrawn per step, reset when |x|_0 > s0 + cap).
Sequence gen_sequence(const SynthConfig& cfg);

/// Video-like sequence: a smooth rank-r background in [0.1, 0.65] and a moving
/// rectangular foreground block of `block` pixels.
struct VideoConfig {
  Eigen::Index height = 60;
  Eigen::Index width = 80;
  Eigen::Index rank = 3;
  Eigen::Index frames = 80;
  Eigen::Index block = 30;
  std::uint64_t seed = 0;
};

struct VideoSequence {
  Sequence parts;
  std::vector<std::vector<bool>> masks;  ///< per-frame foreground support
};

VideoSequence gen_video_sequence(const VideoConfig& cfg);

/// Divisor of n closest to sqrt(3n/4), the height of a 4:3 landscape frame.
Eigen::Index default_height(Eigen::Index n);

// ---------------------------------------------------------------------------
// Monte-Carlo phase grid

enum class Method { Nl1, L1L1, L1 };

Method parse_method(const std::string& name);
std::string method_name(Method m);

/// Solver configuration of each method: n-l1 with J adaptive priors, l1-l1
/// with one prior and frozen weights beta = (1/2, 1/2), plain l1.
SolverConfig method_config(Method m, const SolverConfig& base);
int method_priors(Method m, int J);

struct PhaseCell {
  Eigen::Index s0 = 0;
  Eigen::Index m = 0;
  int trials = 0;
  int successes = 0;
  double bound_nl1 = 0.0;
  double bound_l1l1 = 0.0;
  double bound_l1 = 0.0;
};

struct PhaseGrid {
  std::vector<Eigen::Index> s0_values;
  std::vector<Eigen::Index> m_values;
  std::vector<PhaseCell> cells;  ///< s0-major order

  const PhaseCell& at(size_t s0_index, size_t m_index) const { return cells[s0_index * m_values.size() + m_index]; }
};

struct PhaseOptions {
  Method method = Method::Nl1;
  int J = 3;
  bool grade_all = false;
  double success_tol = 1e-2;
  SolverConfig solver;
  PcpOptions pcp;
  /// 0 selects CORPCA_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Noisy bound curves at one column, evaluated from ground truth.
struct BoundTriple {
  double nl1 = 0.0;
  double l1l1 = 0.0;
  double l1 = 0.0;
};
BoundTriple ground_truth_bounds(const Matrix& S, Eigen::Index column, int J, double eps);

/// Outcome of one trial at one (s0, m) cell.
struct TrialOutcome {
  int graded = 0;
  int successes = 0;
  BoundTriple bounds;
};

/// Runs a fresh trial: sequence, bootstrap, online separation over the test
/// columns. Solver errors count as failures.
TrialOutcome run_trial(const SynthConfig& cfg, Eigen::Index m, std::uint64_t sensing_seed, const PhaseOptions& opts);

/// Several methods on one shared sequence, bootstrap and sensing matrix.
std::vector<TrialOutcome> run_paired_trial(const SynthConfig& cfg, Eigen::Index m, std::uint64_t sensing_seed,
                                           const std::vector<Method>& methods, const PhaseOptions& opts);

/// Seeds of a trial: the sequence depends on (seed, s0, trial), the sensing
/// matrix additionally on m.
std::uint64_t trial_sequence_seed(std::uint64_t seed, Eigen::Index s0, int trial);
std::uint64_t trial_sensing_seed(std::uint64_t seed, Eigen::Index s0, Eigen::Index m, int trial);

PhaseGrid run_phase_grid(const SynthConfig& cfg, const std::vector<Eigen::Index>& s0_list,
                         const std::vector<Eigen::Index>& m_list, int trials, std::uint64_t seed,
                         const PhaseOptions& opts);

/// Worker count from CORPCA_THREADS, falling back to the hardware concurrency.
unsigned default_threads();

// ---------------------------------------------------------------------------
// ROC

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// For each threshold t: detected = {i : |x_i| > t}. Points sorted by
/// threshold, descending. An empty threshold list sweeps every distinct
/// magnitude plus both extremes. Throws DomainError if the mask is empty.
std::vector<RocPoint> roc_eval(const Eigen::Ref<const Vector>& x_hat, const std::vector<bool>& mask,
                               std::vector<double> thresholds);

/// Trapezoidal area under ROC points (sorted by fpr internally).
double roc_auc(std::vector<RocPoint> points);

struct F1Result {
  double f1 = 0.0;
  double threshold = 0.0;
};

/// Best F1 of the detector |x_i| > t over all thresholds t.
F1Result oracle_f1(const Eigen::Ref<const Vector>& x_hat, const std::vector<bool>& mask);

}  // namespace corpca
