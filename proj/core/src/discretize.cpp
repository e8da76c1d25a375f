#include "meddis/discretize.hpp"

#include <algorithm>
#include <cmath>

namespace meddis {
namespace {

constexpr double kFracSnap = 1e-12;

double fractional_part(double u) {
  double f = u - std::floor(u);
  if (f > 1.0 - kFracSnap) f = 0.0;
  return f;
}

}  // namespace

DiscretizedMetric::DiscretizedMetric(double tau, double b) : tau_(tau), b_(b), log_tau_(std::log(tau)) {
  if (!(tau > 1.0)) throw Error("discretize: tau must exceed 1");
  if (!(b >= 0.0 && b < 1.0)) throw Error("discretize: offset b must lie in [0, 1)");
}

int DiscretizedMetric::level_of(double c) const {
  if (c <= 0.0) return -1;
  const double l = std::log(c) / log_tau_ - b_;
  return std::max(0, static_cast<int>(std::ceil(l - kFracSnap)));
}

double DiscretizedMetric::level_value(int level) const {
  if (level <= -2) return -1.0;
  if (level == -1) return 0.0;
  return std::pow(tau_, level + b_);
}

DiscretizedSpace discretize(const MetricSpace& metric, double tau, double b) {
  DiscretizedSpace out{DiscretizedMetric(tau, b), {}, {}};
  out.chat.resize(metric.dist.size());
  out.level.resize(metric.dist.size());
  for (std::size_t k = 0; k < metric.dist.size(); ++k) {
    out.level[k] = out.levels.level_of(metric.dist[k]);
    out.chat[k] = out.levels.level_value(out.level[k]);
  }
  return out;
}

double offset_objective(std::span<const OffsetInput> inputs, double tau, double b) {
  const DiscretizedMetric dm(tau, b);
  double total = 0.0;
  for (const auto& in : inputs) total += in.mass * positive_part(dm.rounded(in.distance) - tau * in.discount);
  return total;
}

OffsetChoice choose_offset(std::span<const OffsetInput> inputs, double tau) {
  if (!(tau > 1.0)) throw Error("choose_offset: tau must exceed 1");
  std::vector<double> candidates{0.0};
  const double log_tau = std::log(tau);
  for (const auto& in : inputs)
    if (in.distance >= 1.0 - 1e-9 && in.mass > 0.0)
      candidates.push_back(fractional_part(std::log(in.distance) / log_tau));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  OffsetChoice best{0.0, offset_objective(inputs, tau, 0.0)};
  for (double b : candidates) {
    const double v = offset_objective(inputs, tau, b);
    if (v < best.objective) best = {b, v};
  }
  return best;
}

}  // namespace meddis
