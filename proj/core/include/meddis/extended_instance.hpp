#pragma once

#include <vector>

#include "meddis/instance.hpp"

namespace meddis {

// A knapsack instance with pre-selected facilities F0 and a pruned client
// set C'. The base instance is not owned and must outlive this object.
struct ExtendedInstance {
  const Instance* base = nullptr;
  FacilitySet f0;
  std::vector<int> cprime;  // client positions, sorted
  double rho = 0.5;
  double delta = 2.0 / 3.0;
  double est = 0.0;
  double c0 = 0.0;
  // R_j indexed by client position; filled by compute_radii().
  std::vector<double> radius;
  std::vector<bool> radius_capped;

  bool has_radii() const { return !radius.empty(); }
};

}  // namespace meddis
