#include "meddis/solver.hpp"

#include "meddis/iterround.hpp"

namespace meddis {

double default_tau(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kCardinality: return 1.91;
    case ConstraintKind::kMatroid: return 2.36;
    case ConstraintKind::kKnapsack: break;
  }
  return KnapsackOptions{}.tau;
}

SolveReport solve_instance(const Instance& instance, const SolveOptions& options) {
  const ConstraintKind kind = constraint_kind(instance);
  const double tau = options.tau.value_or(kind == ConstraintKind::kKnapsack ? options.knapsack.tau : default_tau(kind));
  switch (kind) {
    case ConstraintKind::kCardinality: return solve_kmeddis(instance, tau, options.h.value_or(2));
    case ConstraintKind::kMatroid: return solve_matmeddis(instance, tau, options.h.value_or(1));
    case ConstraintKind::kKnapsack: break;
  }
  if (options.h && *options.h != 1) throw Error("the knapsack pipeline only supports step size 1");
  KnapsackOptions k = options.knapsack;
  k.tau = tau;
  return solve_knapmeddis(instance, k);
}

}  // namespace meddis
