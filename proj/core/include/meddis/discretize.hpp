#pragma once

#include <span>
#include <vector>

#include "meddis/instance.hpp"

namespace meddis {

// Geometric distance levels D_{-2} = -1, D_{-1} = 0 and D_l = tau^(l + b)
// for l >= 0. A distance is rounded up to the smallest level covering it.
// Rounded distances need not form a metric.
class DiscretizedMetric {
 public:
  DiscretizedMetric(double tau, double b);

  double tau() const { return tau_; }
  double offset() const { return b_; }

  // Smallest level l >= -1 with D_l >= c.
  int level_of(double c) const;
  double level_value(int level) const;
  double rounded(double c) const { return level_value(level_of(c)); }

 private:
  double tau_;
  double b_;
  double log_tau_;
};

// Discretization of a whole metric: rounded distances and their levels.
struct DiscretizedSpace {
  DiscretizedMetric levels;
  std::vector<double> chat;  // row-major like MetricSpace::dist
  std::vector<int> level;
};

DiscretizedSpace discretize(const MetricSpace& metric, double tau, double b);

// One (facility, client) pair of a fractional support: its distance,
// the client's discount and the pair's mass y_i * w_j.
struct OffsetInput {
  double distance = 0.0;
  double discount = 0.0;
  double mass = 0.0;
};

struct OffsetChoice {
  double b = 0.0;
  double objective = 0.0;  // sum mass * (chat - tau * r)^+ at the chosen b
};

// Evaluates sum mass * (chat - tau * r)^+ for a given offset.
double offset_objective(std::span<const OffsetInput> inputs, double tau, double b);

// Minimizes the objective over b in [0, 1) by evaluating every breakpoint
// {0} together with frac(log_tau c); the objective is nondecreasing and
// right-continuous between breakpoints.
OffsetChoice choose_offset(std::span<const OffsetInput> inputs, double tau);

}  // namespace meddis
