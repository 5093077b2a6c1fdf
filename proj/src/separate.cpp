#include <algorithm>
#include <cmath>
#include <limits>

#include "corpca/error.hpp"
#include "corpca/io.hpp"
#include "corpca/random.hpp"

namespace corpca {

Eigen::Index measurement_count(double rate, Eigen::Index n) {
  if (!(rate > 0.0 && rate <= 1.0)) throw InvalidInput("invalid rate: must lie in (0, 1]");
  if (rate * static_cast<double>(n) < 1.0) throw InvalidInput("invalid rate: rate * n < 1");
  return std::clamp<Eigen::Index>(std::llround(rate * static_cast<double>(n)), 1, n);
}

SeparateResult separate_sequence(const FrameSequence& seq, const SeparateOptions& opts) {
  if (seq.frames.empty()) throw InvalidInput("empty sequence");
  if (opts.train < 1) throw InvalidInput("train must be at least 1");
  if (opts.train >= seq.size())
    throw InvalidInput("train (" + std::to_string(opts.train) + ") leaves no test frames out of " +
                       std::to_string(seq.size()));
  if (opts.J < 0) throw InvalidInput("J must be nonnegative");
  const Eigen::Index n = seq.n();
  const Eigen::Index m = measurement_count(opts.rate, n);

  Bootstrap boot = bootstrap_prior(seq.columns(0, opts.train), std::max(opts.J, 1), opts.pcp);
  boot.side_info = SideInfoSet::uniform(n, method_priors(opts.method, opts.J));
  const SensingOperator phi =
      m == n ? SensingOperator::identity(n) : SensingOperator::gaussian(m, n, derive_seed(opts.seed, {3}));
  OnlineSeparator sep(std::move(boot), method_config(opts.method, opts.solver));

  SeparateResult out;
  out.m = m;
  for (size_t t = opts.train; t < seq.size(); ++t) {
    const MeasurementModel meas = MeasurementModel::observe(phi, seq.frames[t]);
    const SeparationResult res = sep.process(meas);

    FrameReport rep;
    rep.frame = t;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
    const double ynorm = meas.y.norm();
    const double fit = (phi.apply(res.x_hat + res.v_hat) - meas.y).norm();
    rep.residual = ynorm > 0.0 ? fit / ynorm : fit;
    rep.f1 = rep.threshold = rep.auc = std::numeric_limits<double>::quiet_NaN();

    if (seq.has_masks()) {
      const std::vector<bool>& mask = seq.masks[t];
      if (std::find(mask.begin(), mask.end(), true) != mask.end()) {
        const F1Result f1 = oracle_f1(res.x_hat, mask);
        rep.f1 = f1.f1;
        rep.threshold = f1.threshold;
        rep.auc = roc_auc(roc_eval(res.x_hat, mask, {}));
        const double top = res.x_hat.cwiseAbs().maxCoeff();
        std::vector<double> grid{-1.0};
        for (int k = 0; k <= 50; ++k) grid.push_back(top * k / 50.0);
        rep.roc = roc_eval(res.x_hat, mask, grid);
      }
    }
    out.x_hat.push_back(res.x_hat);
    out.v_hat.push_back(res.v_hat);
    out.frames.push_back(std::move(rep));
  }
  return out;
}

}  // namespace corpca
