#pragma once

// Dispatch on the constraint family of an instance.

#include <optional>

#include "meddis/instance.hpp"
#include "meddis/knapsack.hpp"
#include "meddis/report.hpp"

namespace meddis {

struct SolveOptions {
  std::optional<double> tau;  // 1.91 cardinality, 2.36 matroid, knapsack.tau otherwise
  std::optional<int> h;       // 2 cardinality, 1 matroid; knapsack always uses 1
  KnapsackOptions knapsack;
};

double default_tau(ConstraintKind kind);

SolveReport solve_instance(const Instance& instance, const SolveOptions& options = {});

}  // namespace meddis
