// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance --only 5   a single criterion (repeatable)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "corpca/bounds.hpp"
#include "corpca/experiments.hpp"
#include "corpca/io.hpp"
#include "corpca/linalg.hpp"
#include "corpca/proximal.hpp"
#include "corpca/random.hpp"
#include "corpca/solvers.hpp"

using namespace corpca;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line.front() != '#') out += line + "\n";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Data rows produced by criteria 5, 6 and 8, kept for the determinism check.
std::map<int, std::vector<std::string>> g_rows;

// ------------------------------------------------------------------------ 1

double scalar_objective(double u, double x, const std::vector<double>& p, const std::vector<double>& c, double tau) {
  double g = 0.0;
  for (size_t k = 0; k < p.size(); ++k) g += c[k] * std::abs(u - p[k]);
  return tau * g + 0.5 * (u - x) * (u - x);
}

double grid_minimizer(double x, const std::vector<double>& p, const std::vector<double>& c, double tau) {
  double lo = std::min(x, *std::min_element(p.begin(), p.end())) - 1.0;
  double hi = std::max(x, *std::max_element(p.begin(), p.end())) + 1.0;
  double best = lo;
  for (double h : {1e-3, 1e-5, 1e-7, 1e-9}) {
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

Outcome criterion1() {
  Rng rng(kSeed + 1);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_arg = 0.0;
  double worst_obj = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int J = count(rng);
    SideInfoSet si = SideInfoSet::uniform(1, J);
    double total = 0.0;
    for (int j = 0; j <= J; ++j) total += si.beta(j) = 0.05 + unit(rng);
    si.beta /= total;
    for (auto& z : si.priors) z(0) = 2.0 * normal(rng);
    const double tau = 3.0 * unit(rng);
    Vector x(1);
    x(0) = 3.0 * normal(rng);

    const double got = prox_nl1(x, si, tau)(0);
    std::vector<double> p, c;
    for (int j = 0; j <= J; ++j) {
      p.push_back(si.prior_value(j, 0));
      c.push_back(si.beta(j));
    }
    const double want = grid_minimizer(x(0), p, c, tau);
    worst_arg = std::max(worst_arg, std::abs(got - want));
    worst_obj = std::max(worst_obj, std::abs(scalar_objective(got, x(0), p, c, tau) - scalar_objective(want, x(0), p, c, tau)));
  }
  return {worst_arg <= 1e-3 && worst_obj <= 1e-6,
          "1000 instances, max |du| " + fmt("%.2e", worst_arg) + " (<= 1e-3), max |df| " + fmt("%.2e", worst_obj) +
              " (<= 1e-6)"};
}

// ------------------------------------------------------------------------ 2

Outcome criterion2() {
  Rng rng(kSeed + 2);
  std::uniform_int_distribution<int> dim_n(2, 100);
  std::uniform_int_distribution<int> dim_d(1, 20);
  double worst_s = 0.0;
  double worst_r = 0.0;
  int degenerate = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = dim_n(rng);
    const Eigen::Index d = std::min<Eigen::Index>(dim_d(rng), n);
    Matrix B = randn(n, d, rng);
    if (trial % 5 == 1 && d > 1) B.col(d - 1) = B.leftCols(d - 1) * randn(d - 1, rng);
    Vector v = randn(n, rng);
    if (trial % 4 == 0) {
      v = B * randn(d, rng);
      ++degenerate;
    } else if (trial % 4 == 2 && n > d) {
      v = B * randn(d, rng) + 1e-9 * randn(n, rng);
      ++degenerate;
    }
    Matrix C(n, d + 1);
    C << B, v;
    const ThinSvd inc = inc_svd(thin_svd(B), v);
    Eigen::JacobiSVD<Matrix> ref(C);
    const Vector& want = ref.singularValues();
    const double scale = std::max(1.0, want(0));
    for (Eigen::Index i = 0; i < want.size(); ++i) {
      const double got = i < inc.S.size() ? inc.S(i) : 0.0;
      worst_s = std::max(worst_s, std::abs(got - want(i)) / scale);
    }
    for (Eigen::Index i = want.size(); i < inc.S.size(); ++i) worst_s = std::max(worst_s, inc.S(i) / scale);
    worst_r = std::max(worst_r, (inc.reconstruct() - C).norm() / C.norm());
  }
  return {worst_s <= 1e-8 && worst_r <= 1e-8,
          "200 instances (" + std::to_string(degenerate) + " span-degenerate), max sigma err " + fmt("%.2e", worst_s) +
              ", max reconstruction err " + fmt("%.2e", worst_r) + " (<= 1e-8)"};
}

// ------------------------------------------------------------------------ 3

Outcome criterion3() {
  Rng rng(kSeed + 3);
  const Eigen::Index n = 30;
  const SensingOperator phi = SensingOperator::gaussian(15, n, kSeed + 3);
  const MeasurementModel meas = MeasurementModel::observe(phi, randn(n, rng));
  auto f = [&](const Vector& x, const Vector& v) { return 0.5 * (phi.apply(x + v) - meas.y).squaredNorm(); };
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    const Vector x = randn(n, rng);
    const Vector v = randn(n, rng);
    const Vector g = data_gradient(meas, x, v);
    Vector gx(n), gv(n);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector xp = x, xm = x, vp = v, vm = v;
      xp(i) += h;
      xm(i) -= h;
      vp(i) += h;
      vm(i) -= h;
      gx(i) = (f(xp, v) - f(xm, v)) / (2.0 * h);
      gv(i) = (f(x, vp) - f(x, vm)) / (2.0 * h);
    }
    worst = std::max({worst, (g - gx).norm() / g.norm(), (g - gv).norm() / g.norm()});
  }
  return {worst <= 1e-5, "20 points, max relative error " + fmt("%.2e", worst) + " (<= 1e-5)"};
}

// ------------------------------------------------------------------------ 4

Outcome criterion4() {
  Rng rng(kSeed + 4);
  const Matrix L = randn(50, 2, rng) * randn(2, 50, rng);
  Matrix S = Matrix::Zero(50, 50);
  std::vector<int> cells(2500);
  for (int i = 0; i < 2500; ++i) cells[static_cast<size_t>(i)] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  std::uniform_real_distribution<double> mag(-10.0, 10.0);
  for (int k = 0; k < 125; ++k) S(cells[static_cast<size_t>(k)] % 50, cells[static_cast<size_t>(k)] / 50) = mag(rng);
  const PcpResult r = batch_pcp(L + S);
  const double el = (r.L - L).norm() / L.norm();
  const double es = (r.S - S).norm() / S.norm();
  return {el <= 1e-3 && es <= 1e-3 && r.iterations <= 2000,
          "rank 2 + 5% sparse, L err " + fmt("%.2e", el) + ", S err " + fmt("%.2e", es) + " (<= 1e-3), " +
              std::to_string(r.iterations) + " iterations (<= 2000)"};
}

// ------------------------------------------------------------------------ 5

Outcome criterion5() {
  SynthConfig cfg;
  PhaseOptions opts;
  const PhaseGrid grid = run_phase_grid(cfg, {10}, {200}, 20, kSeed + 5, opts);
  std::ostringstream csv;
  write_phase_csv(csv, grid, "");
  g_rows[5].push_back(data_rows(csv.str()));
  const PhaseCell& c = grid.cells.front();
  const double rate = static_cast<double>(c.successes) / c.trials;
  return {rate >= 0.9, "n=500 s0=10 m=200: " + std::to_string(c.successes) + "/" + std::to_string(c.trials) +
                           " successes, rate " + fmt("%.2f", rate) + " (>= 0.9)"};
}

// ------------------------------------------------------------------------ 6

Outcome criterion6() {
  SynthConfig cfg;
  cfg.s0 = 30;
  const Eigen::Index m = 250;
  const std::vector<Method> methods{Method::Nl1, Method::L1L1, Method::L1};
  PhaseOptions opts;
  std::vector<int> wins(methods.size(), 0);
  std::ostringstream csv;
  csv << "trial,nl1,l1l1,l1\n";
  for (int trial = 0; trial < 20; ++trial) {
    cfg.seed = trial_sequence_seed(kSeed + 6, cfg.s0, trial);
    const auto outcomes = run_paired_trial(cfg, m, trial_sensing_seed(kSeed + 6, cfg.s0, m, trial), methods, opts);
    csv << trial;
    for (size_t k = 0; k < methods.size(); ++k) {
      wins[k] += outcomes[k].successes;
      csv << ',' << outcomes[k].successes;
    }
    csv << '\n';
  }
  g_rows[6].push_back(csv.str());
  const bool pass = wins[0] >= wins[1] && wins[1] >= wins[2];
  return {pass, "n=500 s0=30 m=250, 20 paired trials: nl1 " + std::to_string(wins[0]) + ", l1l1 " +
                    std::to_string(wins[1]) + ", l1 " + std::to_string(wins[2]) + " (nl1 >= l1l1 >= l1)"};
}

// ------------------------------------------------------------------------ 7

Outcome criterion7() {
  using namespace bounds;
  const double l1 = bound_l1(500, 10);
  bool pass = std::abs(l1 - 93.24) <= 0.01;
  std::string detail = "bound_l1(500,10) = " + fmt("%.4f", l1);

  for (Eigen::Index s0 : {10, 30, 50}) {
    Rng rng(kSeed + 7 + static_cast<std::uint64_t>(s0));
    Vector x = Vector::Zero(500);
    for (Eigen::Index i = 0; i < s0; ++i) x(i * (500 / s0)) = randn(1, rng)(0);
    const auto beta = oracle_beta(x, {x}, 0.8);
    const double nl1 = bound_nl1(compute_alpha_eta(x, {x}, beta, 0.8).inputs);
    const double ref = bound_l1(500, static_cast<double>(s0));
    pass = pass && nl1 < ref;
    detail += ", s0=" + std::to_string(s0) + ": nl1 " + fmt("%.2f", nl1) + " < l1 " + fmt("%.2f", ref);
  }

  double worst = 0.0;
  Rng rng(kSeed + 70);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = Vector::Zero(300);
    for (Eigen::Index i = 0; i < 20; ++i) x(i * 15 + trial % 15) = randn(1, rng)(0);
    const std::vector<Vector> priors{x + 0.2 * randn(300, rng), 0.5 * x};
    const auto beta = oracle_beta(x, priors, 0.8);
    const BoundInputs in = compute_alpha_eta(x, priors, beta, 0.8).inputs;
    const double rho = 0.1 + 0.8 * (trial % 10) / 10.0;
    const double noiseless = bound_nl1(in);
    worst = std::max(worst, std::abs(bound_nl1(in, true, rho) - (noiseless + 0.5) / rho));
    worst = std::max(worst, std::abs(to_noisy(noiseless, rho) - (noiseless + 0.5) / rho));
  }
  pass = pass && worst <= 1e-9;
  detail += ", noisy relation max err " + fmt("%.1e", worst);
  return {pass, detail};
}

// ------------------------------------------------------------------------ 8

double mean_f1(const fs::path& summary) {
  std::istringstream in(slurp(summary));
  std::string line;
  double total = 0.0;
  int count = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    total += std::stod(cells.at(5));
    ++count;
  }
  return count ? total / count : 0.0;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  if (status != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return status;
}

Outcome criterion8() {
  const fs::path dir = fs::temp_directory_path() / "corpca_acceptance_8";
  fs::remove_all(dir);
  const std::string seed = std::to_string(kSeed + 8);
  if (cli({"synth", "--n", "4800", "--height", "60", "--r", "3", "--d", "40", "--q", "40", "--s0", "30", "--seed",
           seed, "--pattern", "block", "--out", (dir / "data").string()}) != 0)
    return {false, "synth failed"};

  std::vector<std::string> rows;
  std::vector<double> f1;
  for (const char* rate : {"0.4", "1"}) {
    const fs::path out = dir / (std::string("rate_") + rate);
    if (cli({"separate", "--frames", (dir / "data" / "frames").string(), "--masks", (dir / "data" / "masks").string(),
             "--rate", rate, "--train", "40", "--j", "3", "--seed", seed, "--out", out.string()}) != 0)
      return {false, std::string("separate failed at rate ") + rate};
    f1.push_back(mean_f1(out / "summary.csv"));
    rows.push_back(data_rows(slurp(out / "summary.csv")) + data_rows(slurp(out / "roc.csv")));
  }
  g_rows[8].push_back(rows[0] + rows[1]);
  fs::remove_all(dir);
  return {f1[0] >= 0.8 && f1[1] >= 0.95, "60x80 video, mean F1 " + fmt("%.4f", f1[0]) + " at rate 0.4 (>= 0.8), " +
                                             fmt("%.4f", f1[1]) + " at rate 1 (>= 0.95)"};
}

// ------------------------------------------------------------------------ 9

Outcome criterion9() {
  const std::map<int, std::function<Outcome()>> sources{{5, criterion5}, {6, criterion6}, {8, criterion8}};
  std::string detail;
  bool pass = true;
  for (const auto& [id, run] : sources) {
    while (g_rows[id].size() < 2) run();
    const bool same = g_rows[id][0] == g_rows[id][1] && !g_rows[id][0].empty();
    pass = pass && same;
    detail += (detail.empty() ? "" : ", ") + std::string("criterion ") + std::to_string(id) +
              (same ? " identical" : " DIFFERS");
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]...\n");
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  int failures = 0;
  for (int id = 1; id <= 9; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<size_t>(id - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
