#include <algorithm>
#include <cmath>
#include <functional>

#include "corpca/error.hpp"
#include "corpca/experiments.hpp"

namespace corpca {

std::vector<RocPoint> roc_eval(const Eigen::Ref<const Vector>& x_hat, const std::vector<bool>& mask,
                               std::vector<double> thresholds) {
  if (static_cast<size_t>(x_hat.size()) != mask.size()) throw InvalidInput("roc_eval: score and mask lengths differ");
  const auto positives = std::count(mask.begin(), mask.end(), true);
  const auto negatives = static_cast<std::ptrdiff_t>(mask.size()) - positives;
  if (positives == 0) throw DomainError("roc_eval: empty true mask, tpr undefined");

  const Eigen::ArrayXd mag = x_hat.array().abs();
  if (thresholds.empty()) {
    thresholds.assign(mag.data(), mag.data() + mag.size());
    thresholds.push_back(-1.0);
    thresholds.push_back(mag.maxCoeff() + 1.0);
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // Sweep thresholds against magnitudes sorted descending.
  std::vector<Eigen::Index> order(static_cast<size_t>(mag.size()));
  for (Eigen::Index i = 0; i < mag.size(); ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mag(a) > mag(b); });

  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  size_t pos = 0;
  double tp = 0.0;
  double fp = 0.0;
  for (double t : thresholds) {
    while (pos < order.size() && mag(order[pos]) > t) {
      (mask[static_cast<size_t>(order[pos])] ? tp : fp) += 1.0;
      ++pos;
    }
    RocPoint p;
    p.threshold = t;
    p.tpr = tp / static_cast<double>(positives);
    p.fpr = negatives > 0 ? fp / static_cast<double>(negatives) : 0.0;
    out.push_back(p);
  }
  return out;
}

double roc_auc(std::vector<RocPoint> points) {
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
  });
  double area = 0.0;
  for (size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  return area;
}

F1Result oracle_f1(const Eigen::Ref<const Vector>& x_hat, const std::vector<bool>& mask) {
  if (static_cast<size_t>(x_hat.size()) != mask.size()) throw InvalidInput("oracle_f1: score and mask lengths differ");
  const auto positives = static_cast<double>(std::count(mask.begin(), mask.end(), true));
  if (positives == 0.0) throw DomainError("oracle_f1: empty true mask");

  const Eigen::ArrayXd mag = x_hat.array().abs();
  std::vector<Eigen::Index> order(static_cast<size_t>(mag.size()));
  for (Eigen::Index i = 0; i < mag.size(); ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mag(a) > mag(b); });

  // Detected sets are prefixes of `order` ending at a change in magnitude.
  F1Result best{0.0, mag.maxCoeff()};
  double tp = 0.0;
  double detected = 0.0;
  for (size_t k = 0; k < order.size(); ++k) {
    tp += mask[static_cast<size_t>(order[k])] ? 1.0 : 0.0;
    detected += 1.0;
    const bool last = k + 1 == order.size();
    if (!last && mag(order[k + 1]) == mag(order[k])) continue;
    const double f1 = 2.0 * tp / (detected + positives);
    if (f1 > best.f1) best = {f1, last ? -1.0 : mag(order[k + 1])};
  }
  return best;
}

}  // namespace corpca
