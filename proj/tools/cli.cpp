#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "corpca/bounds.hpp"
#include "corpca/error.hpp"
#include "corpca/experiments.hpp"
#include "corpca/io.hpp"

namespace corpca::cli {

namespace fs = std::filesystem;

namespace {

struct PhaseArgs {
  Eigen::Index n = 500;
  std::vector<Eigen::Index> s0_list;
  std::vector<Eigen::Index> m_list;
  int trials = 0;
  int J = 3;
  std::uint64_t seed = 0;
  std::string out;
  std::string method = "nl1";
  bool grade_all = false;
  Eigen::Index r = 5;
  Eigen::Index d = 100;
  Eigen::Index q = 100;
};

struct BoundArgs {
  Eigen::Index n = 0;
  Eigen::Index s0 = 0;
  std::string prior_file;
  std::optional<double> rho;
  std::string mode = "nl1";
  double eps = 0.8;
  std::string out;
};

struct SeparateArgs {
  std::string frames;
  std::string masks;
  std::string pattern = "*.pgm";
  double rate = 1.0;
  size_t train = 0;
  int J = 3;
  std::uint64_t seed = 0;
  std::string out;
  std::string method = "nl1";
};

struct SynthArgs {
  Eigen::Index n = 500;
  Eigen::Index r = 5;
  Eigen::Index d = 100;
  Eigen::Index q = 100;
  Eigen::Index s0 = 10;
  std::uint64_t seed = 0;
  std::string out;
  Eigen::Index height = 0;
  std::string pattern = "random";
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  return f;
}

std::string join(const std::vector<Eigen::Index>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string frame_name(const std::string& prefix, size_t t) {
  std::ostringstream ss;
  ss << prefix << std::setw(4) << std::setfill('0') << t << ".pgm";
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> solver_fields(const SolverConfig& c) {
  return {{"lambda", c.lambda > 0 ? format_number(c.lambda) : "1/sqrt(n)"},
          {"epsilon", format_number(c.epsilon)},
          {"mu_bar_ratio", format_number(c.mu_bar_ratio)},
          {"tol", format_number(c.tol)},
          {"max_iter", std::to_string(c.max_iter)}};
}

// -------------------------------------------------------------------- phase

void run_phase(const PhaseArgs& a) {
  SynthConfig cfg;
  cfg.n = a.n;
  cfg.r = a.r;
  cfg.d = a.d;
  cfg.q = a.q;
  PhaseOptions opts;
  opts.method = parse_method(a.method);
  opts.J = a.J;
  opts.grade_all = a.grade_all;
  const PhaseGrid grid = run_phase_grid(cfg, a.s0_list, a.m_list, a.trials, a.seed, opts);

  auto fields = std::vector<std::pair<std::string, std::string>>{
      {"cmd", "phase"}, {"seed", std::to_string(a.seed)}, {"n", std::to_string(a.n)},
      {"r", std::to_string(a.r)}, {"d", std::to_string(a.d)}, {"q", std::to_string(a.q)},
      {"J", std::to_string(a.J)}, {"method", a.method}, {"grade_all", a.grade_all ? "1" : "0"},
      {"s0_list", join(a.s0_list)}, {"m_list", join(a.m_list)}};
  for (auto& f : solver_fields(opts.solver)) fields.push_back(f);
  std::ofstream out = open_output(a.out);
  write_phase_csv(out, grid, csv_comment(fields));
}

// -------------------------------------------------------------------- bound

struct PriorTable {
  Vector x;
  std::vector<Vector> priors;
};

// Columns x, z_1, ..., z_J; '#' lines are comments, the first other line is
// the header.
PriorTable read_prior_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = false;
  size_t width = 0;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!header) {
      header = true;
      width = cells.size();
      if (width < 1) throw FormatError(path.string() + ": empty header");
      continue;
    }
    if (cells.size() != width)
      throw FormatError(path.string() + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(width));
    std::vector<double> row;
    for (const std::string& c : cells) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v))
        throw FormatError(path.string() + ": line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path.string() + ": no data rows");
  PriorTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.x.resize(n);
  t.priors.assign(width - 1, Vector(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    t.x(i) = rows[static_cast<size_t>(i)][0];
    for (size_t j = 1; j < width; ++j) t.priors[j - 1](i) = rows[static_cast<size_t>(i)][j];
  }
  return t;
}

void run_bound(const BoundArgs& a) {
  if (a.n < 1) throw InvalidInput("--n must be positive");
  if (a.rho && !(*a.rho > 0.0 && *a.rho < 1.0)) throw InvalidInput("--rho must lie in (0, 1)");
  const Method mode = parse_method(a.mode);

  double value = 0.0;
  int J = 0;
  if (a.prior_file.empty()) {
    if (mode != Method::L1) throw InvalidInput("--mode " + a.mode + " requires --prior-file");
    value = bounds::bound_l1(static_cast<double>(a.n), static_cast<double>(a.s0));
    if (a.rho) value = bounds::to_noisy(value, *a.rho);
  } else {
    const PriorTable t = read_prior_file(a.prior_file);
    if (t.x.size() != a.n)
      throw InvalidInput("prior file has " + std::to_string(t.x.size()) + " rows, --n is " + std::to_string(a.n));
    const auto support = (t.x.array().abs() > bounds::kSupportTol).count();
    if (support != a.s0)
      throw InvalidInput("prior file x has support " + std::to_string(support) + ", --s0 is " + std::to_string(a.s0));
    J = static_cast<int>(t.priors.size());
    switch (mode) {
      case Method::L1:
        value = bounds::bound_l1(static_cast<double>(a.n), static_cast<double>(a.s0));
        if (a.rho) value = bounds::to_noisy(value, *a.rho);
        break;
      case Method::L1L1:
        if (J < 1) throw InvalidInput("--mode l1l1 needs a prior column");
        value = bounds::bound_l1l1(t.x, t.priors.back());
        if (a.rho) value = bounds::to_noisy(value, *a.rho);
        break;
      case Method::Nl1: {
        const auto beta = bounds::oracle_beta(t.x, t.priors, a.eps);
        const bounds::AlphaEta ae = bounds::compute_alpha_eta(t.x, t.priors, beta, a.eps);
        value = a.rho ? bounds::bound_nl1(ae.inputs, true, *a.rho) : bounds::bound_nl1(ae.inputs);
        break;
      }
    }
  }

  std::ofstream out = open_output(a.out);
  CsvWriter csv(out,
                csv_comment({{"cmd", "bound"}, {"eps", format_number(a.eps)},
                             {"prior_file", a.prior_file.empty() ? "none" : fs::path(a.prior_file).filename().string()}}),
                {"mode", "n", "s0", "J", "rho", "bound"});
  csv.row(std::vector<std::string>{a.mode, std::to_string(a.n), std::to_string(a.s0), std::to_string(J),
                                   a.rho ? format_number(*a.rho) : "", format_number(value)});
}

// ----------------------------------------------------------------- separate

PgmImage foreground_image(const Vector& x, Eigen::Index h, Eigen::Index w) {
  Vector mag = x.cwiseAbs();
  const double lo = mag.minCoeff();
  const double hi = mag.maxCoeff();
  if (hi > lo) {
    mag = (mag.array() - lo) / (hi - lo);
  } else {
    mag.setZero();
  }
  return vector_to_pgm(mag, h, w);
}

void run_separate(const SeparateArgs& a) {
  FrameSequence seq = load_pgm_sequence(a.frames, a.pattern);
  if (!a.masks.empty()) load_masks(seq, a.masks, a.pattern);
  SeparateOptions opts;
  opts.rate = a.rate;
  opts.train = a.train;
  opts.J = a.J;
  opts.seed = a.seed;
  opts.method = parse_method(a.method);
  const SeparateResult res = separate_sequence(seq, opts);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  for (size_t i = 0; i < res.frames.size(); ++i) {
    const size_t t = res.frames[i].frame;
    write_pgm(dir / frame_name("fg_", t), foreground_image(res.x_hat[i], seq.height, seq.width));
    write_pgm(dir / frame_name("bg_", t), vector_to_pgm(res.v_hat[i], seq.height, seq.width));
  }

  auto fields = std::vector<std::pair<std::string, std::string>>{
      {"cmd", "separate"}, {"seed", std::to_string(a.seed)}, {"rate", format_number(a.rate)},
      {"m", std::to_string(res.m)}, {"n", std::to_string(seq.n())}, {"height", std::to_string(seq.height)},
      {"width", std::to_string(seq.width)}, {"train", std::to_string(a.train)}, {"J", std::to_string(a.J)},
      {"method", a.method}, {"phi", res.m == seq.n() ? "identity" : "gaussian(seed)"}};
  for (auto& f : solver_fields(opts.solver)) fields.push_back(f);
  const std::string comment = csv_comment(fields);

  {
    std::ofstream out = open_output(dir / "summary.csv");
    CsvWriter csv(out, comment, {"frame", "name", "residual", "iterations", "converged", "f1", "threshold", "auc"});
    for (const FrameReport& r : res.frames)
      csv.row(std::vector<std::string>{std::to_string(r.frame), seq.names[r.frame], format_number(r.residual),
                                       std::to_string(r.iterations), r.converged ? "1" : "0", format_number(r.f1),
                                       format_number(r.threshold), format_number(r.auc)});
  }
  if (seq.has_masks()) {
    std::ofstream out = open_output(dir / "roc.csv");
    CsvWriter csv(out, comment, {"frame", "threshold", "fpr", "tpr"});
    for (const FrameReport& r : res.frames)
      for (const RocPoint& p : r.roc)
        csv.row(std::vector<double>{static_cast<double>(r.frame), p.threshold, p.fpr, p.tpr});
  }
}

// -------------------------------------------------------------------- synth

void run_synth(const SynthArgs& a) {
  Sequence parts;
  std::vector<std::vector<bool>> masks;
  Eigen::Index h = 0;
  if (a.pattern == "block") {
    h = a.height > 0 ? a.height : default_height(a.n);
    if (a.n % h != 0) throw InvalidInput("--height must divide --n");
    VideoConfig vc;
    vc.height = h;
    vc.width = a.n / h;
    vc.rank = a.r;
    vc.frames = a.d + a.q;
    vc.block = a.s0;
    vc.seed = a.seed;
    VideoSequence v = gen_video_sequence(vc);
    parts = std::move(v.parts);
    masks = std::move(v.masks);
  } else if (a.pattern == "random") {
    h = a.height > 0 ? a.height : default_height(a.n);
    if (a.n % h != 0) throw InvalidInput("--height must divide --n");
    SynthConfig cfg;
    cfg.n = a.n;
    cfg.r = a.r;
    cfg.d = a.d;
    cfg.q = a.q;
    cfg.s0 = a.s0;
    cfg.seed = a.seed;
    parts = gen_sequence(cfg);
    for (Eigen::Index t = 0; t < parts.S.cols(); ++t) {
      std::vector<bool> m(static_cast<size_t>(a.n));
      for (Eigen::Index i = 0; i < a.n; ++i) m[static_cast<size_t>(i)] = parts.S(i, t) != 0.0;
      masks.push_back(std::move(m));
    }
  } else {
    throw InvalidInput("unknown pattern '" + a.pattern + "' (expected random or block)");
  }
  const Eigen::Index w = a.n / h;

  // Frames are stored in [0, 1]; other ranges are mapped affinely.
  Matrix M = parts.observed();
  double offset = 0.0;
  double scale = 1.0;
  const double lo = M.minCoeff();
  const double hi = M.maxCoeff();
  if (lo < 0.0 || hi > 1.0) {
    offset = lo;
    scale = hi > lo ? 1.0 / (hi - lo) : 1.0;
  }
  M = ((M.array() - offset) * scale).matrix();

  const fs::path dir(a.out);
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "masks");
  for (Eigen::Index t = 0; t < M.cols(); ++t) {
    write_pgm(dir / "frames" / frame_name("frame_", static_cast<size_t>(t)), vector_to_pgm(M.col(t), h, w, 65535));
    Vector mk(a.n);
    for (Eigen::Index i = 0; i < a.n; ++i) mk(i) = masks[static_cast<size_t>(t)][static_cast<size_t>(i)] ? 1.0 : 0.0;
    write_pgm(dir / "masks" / frame_name("mask_", static_cast<size_t>(t)), vector_to_pgm(mk, h, w));
  }

  std::ofstream out = open_output(dir / "truth.csv");
  CsvWriter csv(out,
                csv_comment({{"cmd", "synth"}, {"seed", std::to_string(a.seed)}, {"pattern", a.pattern},
                             {"n", std::to_string(a.n)}, {"height", std::to_string(h)}, {"width", std::to_string(w)},
                             {"r", std::to_string(a.r)}, {"d", std::to_string(a.d)}, {"q", std::to_string(a.q)},
                             {"s0", std::to_string(a.s0)}, {"offset", format_number(offset)},
                             {"scale", format_number(scale)}}),
                {"frame", "index", "row", "col", "value"});
  for (Eigen::Index t = 0; t < parts.S.cols(); ++t)
    for (Eigen::Index i = 0; i < a.n; ++i)
      if (parts.S(i, t) != 0.0)
        csv.row(std::vector<double>{static_cast<double>(t), static_cast<double>(i), static_cast<double>(i % h),
                                    static_cast<double>(i / h), parts.S(i, t) * scale});
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid_input";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
  return "internal";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressive online robust PCA toolkit", "corpca"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  PhaseArgs pa;
  auto* phase = app.add_subcommand("phase", "Monte-Carlo success grid over (s0, m)");
  phase->add_option("--n", pa.n, "Signal dimension")->capture_default_str();
  phase->add_option("--s0-list", pa.s0_list, "Sparsity levels, comma separated")->required()->delimiter(',');
  phase->add_option("--m-list", pa.m_list, "Measurement counts, comma separated")->required()->delimiter(',');
  phase->add_option("--trials", pa.trials, "Trials per cell")->required();
  phase->add_option("--j", pa.J, "Number of sparse priors")->capture_default_str();
  phase->add_option("--seed", pa.seed, "Master seed")->required();
  phase->add_option("--out", pa.out, "Output CSV")->required();
  phase->add_option("--method", pa.method, "nl1, l1l1 or l1")->capture_default_str();
  phase->add_flag("--grade-all", pa.grade_all, "Grade every test column instead of the last");
  phase->add_option("--r", pa.r, "Rank of the low-rank part")->capture_default_str();
  phase->add_option("--d", pa.d, "Training columns")->capture_default_str();
  phase->add_option("--q", pa.q, "Test columns")->capture_default_str();

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Measurement bounds");
  bound->add_option("--n", ba.n, "Signal dimension")->required();
  bound->add_option("--s0", ba.s0, "Support size of x")->required();
  bound->add_option("--prior-file", ba.prior_file, "CSV with columns x, z_1, ..., z_J");
  bound->add_option("--rho", ba.rho, "Noisy bound with this rho");
  bound->add_option("--mode", ba.mode, "nl1, l1l1 or l1")->capture_default_str();
  bound->add_option("--eps", ba.eps, "Weight smoothing of the n-l1 bound")->capture_default_str();
  bound->add_option("--out", ba.out, "Output CSV")->required();

  SeparateArgs sa;
  auto* separate = app.add_subcommand("separate", "Separate a PGM frame sequence");
  separate->add_option("--frames", sa.frames, "Directory of P5 frames")->required();
  separate->add_option("--masks", sa.masks, "Directory of P5 ground-truth masks");
  separate->add_option("--pattern", sa.pattern, "Filename glob")->capture_default_str();
  separate->add_option("--rate", sa.rate, "Measurement rate m/n in (0, 1]")->required();
  separate->add_option("--train", sa.train, "Training frames")->required();
  separate->add_option("--j", sa.J, "Number of sparse priors")->required();
  separate->add_option("--seed", sa.seed, "Seed of the sensing matrix")->required();
  separate->add_option("--out", sa.out, "Output directory")->required();
  separate->add_option("--method", sa.method, "nl1, l1l1 or l1")->capture_default_str();

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Write a synthetic sequence as PGM frames");
  synth->add_option("--n", ya.n, "Pixels per frame")->required();
  synth->add_option("--r", ya.r, "Rank of the background")->required();
  synth->add_option("--d", ya.d, "Training frames")->required();
  synth->add_option("--q", ya.q, "Test frames")->required();
  synth->add_option("--s0", ya.s0, "Support size, or block size in pixels")->required();
  synth->add_option("--seed", ya.seed, "Seed")->required();
  synth->add_option("--out", ya.out, "Output directory")->required();
  synth->add_option("--height", ya.height, "Frame height (default: closest to a 4:3 landscape frame)");
  synth->add_option("--pattern", ya.pattern, "random or block")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "corpca: error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (phase->parsed()) run_phase(pa);
    if (bound->parsed()) run_bound(ba);
    if (separate->parsed()) run_separate(sa);
    if (synth->parsed()) run_synth(ya);
  } catch (const std::exception& e) {
    err << "corpca: error: " << error_kind(e) << ": " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace corpca::cli
