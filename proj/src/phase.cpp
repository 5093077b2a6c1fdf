#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "corpca/bounds.hpp"
#include "corpca/error.hpp"
#include "corpca/experiments.hpp"
#include "corpca/random.hpp"

namespace corpca {

Method parse_method(const std::string& name) {
  if (name == "nl1") return Method::Nl1;
  if (name == "l1l1") return Method::L1L1;
  if (name == "l1") return Method::L1;
  throw InvalidInput("unknown method '" + name + "' (expected nl1, l1l1 or l1)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Nl1:
      return "nl1";
    case Method::L1L1:
      return "l1l1";
    case Method::L1:
      return "l1";
  }
  return "nl1";
}

SolverConfig method_config(Method m, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.weights = m == Method::Nl1 ? WeightMode::Adaptive : WeightMode::Frozen;
  return cfg;
}

int method_priors(Method m, int J) {
  switch (m) {
    case Method::Nl1:
      return J;
    case Method::L1L1:
      return 1;
    case Method::L1:
      return 0;
  }
  return J;
}

unsigned default_threads() {
  if (const char* env = std::getenv("CORPCA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t trial_sequence_seed(std::uint64_t seed, Eigen::Index s0, int trial) {
  return derive_seed(seed, {1, static_cast<std::uint64_t>(s0), static_cast<std::uint64_t>(trial)});
}

std::uint64_t trial_sensing_seed(std::uint64_t seed, Eigen::Index s0, Eigen::Index m, int trial) {
  return derive_seed(seed, {2, static_cast<std::uint64_t>(s0), static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(trial)});
}

BoundTriple ground_truth_bounds(const Matrix& S, Eigen::Index column, int J, double eps) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  BoundTriple out{nan, nan, nan};
  const Vector x = S.col(column);
  const auto n = static_cast<double>(x.size());
  std::vector<Vector> priors;
  for (Eigen::Index j = std::max<Eigen::Index>(0, column - J); j < column; ++j) priors.push_back(S.col(j));

  try {
    const auto beta = bounds::oracle_beta(x, priors, eps);
    const auto ae = bounds::compute_alpha_eta(x, priors, beta, eps);
    out.nl1 = bounds::bound_nl1(ae.inputs, true, bounds::kRhoNl1);
  } catch (const Error&) {
  }
  try {
    const Vector z = column > 0 ? Vector(S.col(column - 1)) : Vector::Zero(x.size());
    out.l1l1 = bounds::to_noisy(bounds::bound_l1l1(x, z), bounds::kRhoL1L1);
  } catch (const Error&) {
  }
  try {
    const double s0 = static_cast<double>((x.array().abs() > bounds::kSupportTol).count());
    out.l1 = bounds::to_noisy(bounds::bound_l1(n, s0), bounds::kRhoL1);
  } catch (const Error&) {
  }
  return out;
}

std::vector<TrialOutcome> run_paired_trial(const SynthConfig& cfg, Eigen::Index m, std::uint64_t sensing_seed,
                                           const std::vector<Method>& methods, const PhaseOptions& opts) {
  const Sequence seq = gen_sequence(cfg);
  const Eigen::Index first = cfg.d;
  const Eigen::Index last = cfg.columns() - 1;
  const int columns = static_cast<int>(cfg.q);
  const BoundTriple bounds = ground_truth_bounds(seq.S, last, opts.J, opts.solver.epsilon);

  std::vector<TrialOutcome> outcomes(methods.size());
  for (auto& o : outcomes) {
    o.graded = opts.grade_all ? columns : 1;
    o.bounds = bounds;
  }
  if (m < 1 || cfg.q < 1) return outcomes;

  Bootstrap boot;
  SensingOperator phi;
  try {
    boot = bootstrap_prior(seq.observed().leftCols(first), std::max(opts.J, 1), opts.pcp);
    phi = m >= cfg.n ? SensingOperator::identity(cfg.n) : SensingOperator::gaussian(m, cfg.n, sensing_seed);
  } catch (const Error&) {
    return outcomes;
  }

  for (size_t k = 0; k < methods.size(); ++k) {
    const Method method = methods[k];
    SideInfoSet si = SideInfoSet::uniform(cfg.n, method_priors(method, opts.J));
    OnlineSeparator sep(Bootstrap{boot.prior, std::move(si)}, method_config(method, opts.solver));
    try {
      for (Eigen::Index t = first; t <= last; ++t) {
        const Vector x_true = seq.S.col(t);
        const MeasurementModel meas = MeasurementModel::observe(phi, seq.L.col(t) + x_true);
        const SeparationResult res = sep.process(meas);
        if (!opts.grade_all && t != last) continue;
        const double denom = x_true.norm();
        const double err = denom > 0.0 ? (res.x_hat - x_true).norm() / denom : res.x_hat.norm();
        if (err <= opts.success_tol) ++outcomes[k].successes;
      }
    } catch (const Error&) {
      // Remaining columns count as failures.
    }
  }
  return outcomes;
}

TrialOutcome run_trial(const SynthConfig& cfg, Eigen::Index m, std::uint64_t sensing_seed, const PhaseOptions& opts) {
  return run_paired_trial(cfg, m, sensing_seed, {opts.method}, opts).front();
}

PhaseGrid run_phase_grid(const SynthConfig& base, const std::vector<Eigen::Index>& s0_list,
                         const std::vector<Eigen::Index>& m_list, int trials, std::uint64_t seed,
                         const PhaseOptions& opts) {
  if (s0_list.empty() || m_list.empty()) throw InvalidInput("run_phase_grid: empty s0 or m list");
  if (trials < 1) throw InvalidInput("run_phase_grid: trials must be positive");

  PhaseGrid grid;
  grid.s0_values = s0_list;
  grid.m_values = m_list;
  const size_t cells = s0_list.size() * m_list.size();
  const size_t tasks = cells * static_cast<size_t>(trials);
  std::vector<TrialOutcome> outcomes(tasks);

  for (Eigen::Index s0 : s0_list) {
    SynthConfig probe = base;
    probe.s0 = s0;
    probe.validate();
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t task = next++; task < tasks; task = next++) {
      const size_t cell = task / static_cast<size_t>(trials);
      const int trial = static_cast<int>(task % static_cast<size_t>(trials));
      const Eigen::Index s0 = s0_list[cell / m_list.size()];
      const Eigen::Index m = m_list[cell % m_list.size()];
      SynthConfig cfg = base;
      cfg.s0 = s0;
      cfg.seed = trial_sequence_seed(seed, s0, trial);
      outcomes[task] = run_trial(cfg, m, trial_sensing_seed(seed, s0, m, trial), opts);
    }
  };
  const unsigned threads = std::min<size_t>(opts.threads > 0 ? opts.threads : default_threads(), tasks);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (size_t cell = 0; cell < cells; ++cell) {
    PhaseCell c;
    c.s0 = s0_list[cell / m_list.size()];
    c.m = m_list[cell % m_list.size()];
    for (int trial = 0; trial < trials; ++trial) {
      const TrialOutcome& o = outcomes[cell * static_cast<size_t>(trials) + static_cast<size_t>(trial)];
      c.trials += o.graded;
      c.successes += o.successes;
      c.bound_nl1 += o.bounds.nl1 / trials;
      c.bound_l1l1 += o.bounds.l1l1 / trials;
      c.bound_l1 += o.bounds.l1 / trials;
    }
    grid.cells.push_back(c);
  }
  return grid;
}

}  // namespace corpca
