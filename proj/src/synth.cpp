#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "corpca/error.hpp"
#include "corpca/experiments.hpp"
#include "corpca/random.hpp"

namespace corpca {

namespace {

// k distinct indices drawn uniformly from [0, n) by a partial Fisher-Yates pass.
std::vector<Eigen::Index> sample_indices(Eigen::Index n, Eigen::Index k, Rng& rng) {
  std::vector<Eigen::Index> pool(static_cast<size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick(rng))]);
  }
  pool.resize(static_cast<size_t>(k));
  return pool;
}

}  // namespace

void SynthConfig::validate() const {
  if (n < 1 || d < 0 || q < 0 || columns() < 1) throw InvalidInput("SynthConfig: dimensions must be positive");
  if (r < 0 || r > std::min(n, columns())) throw InvalidInput("SynthConfig: rank exceeds min(n, d+q)");
  if (s0 < 0 || cap < 0 || s0 + cap > n) throw InvalidInput("SynthConfig: s0 + cap exceeds n");
  if (step_drift() > n) throw InvalidInput("SynthConfig: drift exceeds n");
}

Sequence gen_sequence(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Eigen::Index T = cfg.columns();

  Sequence seq;
  if (cfg.unit_factors) {
    seq.L = Matrix::Ones(cfg.n, cfg.r) * Matrix::Ones(T, cfg.r).transpose();
  } else {
    const Matrix U = randn(cfg.n, cfg.r, rng);
    const Matrix V = randn(T, cfg.r, rng);
    seq.L = U * V.transpose();
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  seq.S = Matrix::Zero(cfg.n, T);
  Vector x = Vector::Zero(cfg.n);
  for (Eigen::Index i : sample_indices(cfg.n, cfg.s0, rng)) x(i) = normal(rng);
  seq.S.col(0) = x;

  const Eigen::Index drift = cfg.step_drift();
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index i : sample_indices(cfg.n, drift, rng)) x(i) = normal(rng);
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < cfg.n; ++i)
      if (x(i) != 0.0) support.push_back(i);
    const auto nnz = static_cast<Eigen::Index>(support.size());
    if (nnz > cfg.s0 + cfg.cap) {
      for (Eigen::Index k : sample_indices(nnz, nnz - cfg.s0, rng)) x(support[static_cast<size_t>(k)]) = 0.0;
    }
    seq.S.col(t) = x;
  }
  return seq;
}

Eigen::Index default_height(Eigen::Index n) {
  const double target = std::sqrt(0.75 * static_cast<double>(n));
  Eigen::Index best = 1;
  for (Eigen::Index h = 1; h <= n; ++h)
    if (n % h == 0 && std::abs(static_cast<double>(h) - target) < std::abs(static_cast<double>(best) - target)) best = h;
  return best;
}

VideoSequence gen_video_sequence(const VideoConfig& cfg) {
  if (cfg.height < 1 || cfg.width < 1 || cfg.frames < 1 || cfg.rank < 1)
    throw InvalidInput("VideoConfig: dimensions must be positive");
  const Eigen::Index bh = default_height(cfg.block);
  const Eigen::Index bw = cfg.block / bh;
  if (cfg.block < 1 || bh > cfg.height || bw > cfg.width) throw InvalidInput("VideoConfig: block does not fit the frame");

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index h = cfg.height;
  const Eigen::Index w = cfg.width;
  const Eigen::Index n = h * w;
  const double pi = std::numbers::pi;

  // Spatial patterns (column-major pixels) and temporal coefficients.
  Matrix U(n, cfg.rank);
  Matrix V(cfg.frames, cfg.rank);
  for (Eigen::Index k = 0; k < cfg.rank; ++k) {
    const double fy = 1.0 + static_cast<double>(k) + unit(rng);
    const double fx = 1.0 + static_cast<double>(k) + unit(rng);
    const double py = 2.0 * pi * unit(rng);
    const double px = 2.0 * pi * unit(rng);
    for (Eigen::Index c = 0; c < w; ++c)
      for (Eigen::Index r = 0; r < h; ++r) {
        const double pattern = std::sin(pi * fy * r / h + py) * std::cos(pi * fx * c / w + px);
        U(c * h + r, k) = k == 0 ? 0.35 + 0.15 * pattern : 0.1 / static_cast<double>(cfg.rank) * pattern;
      }
    const double period = 8.0 + 24.0 * unit(rng);
    const double phase = 2.0 * pi * unit(rng);
    for (Eigen::Index t = 0; t < cfg.frames; ++t)
      V(t, k) = k == 0 ? 1.0 : std::cos(2.0 * pi * static_cast<double>(t) / period + phase);
  }

  VideoSequence out;
  out.parts.L = U * V.transpose();
  out.parts.S = Matrix::Zero(n, cfg.frames);
  out.masks.assign(static_cast<size_t>(cfg.frames), std::vector<bool>(static_cast<size_t>(n), false));

  Eigen::Index row = std::uniform_int_distribution<Eigen::Index>(0, h - bh)(rng);
  Eigen::Index col = std::uniform_int_distribution<Eigen::Index>(0, w - bw)(rng);
  Eigen::Index vr = 1;
  Eigen::Index vc = 2;
  for (Eigen::Index t = 0; t < cfg.frames; ++t) {
    for (Eigen::Index c = col; c < col + bw; ++c)
      for (Eigen::Index r = row; r < row + bh; ++r) {
        out.parts.S(c * h + r, t) = 0.25 + 0.1 * unit(rng);
        out.masks[static_cast<size_t>(t)][static_cast<size_t>(c * h + r)] = true;
      }
    if (row + vr < 0 || row + vr > h - bh) vr = -vr;
    if (col + vc < 0 || col + vc > w - bw) vc = -vc;
    row = std::clamp<Eigen::Index>(row + vr, 0, h - bh);
    col = std::clamp<Eigen::Index>(col + vc, 0, w - bw);
  }
  return out;
}

}  // namespace corpca
