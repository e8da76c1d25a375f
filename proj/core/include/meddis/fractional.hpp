#pragma once

// Natural LP relaxations, distance-optimal repair and facility duplication.

#include <vector>

#include "meddis/extended_instance.hpp"
#include "meddis/instance.hpp"
#include "meddis/lp.hpp"

namespace meddis {

// Values below this are treated as zero when reading LP solutions.
inline constexpr double kSupportTolerance = 1e-9;

struct FractionalSolution {
  int num_facilities = 0;
  int num_clients = 0;
  std::vector<double> y;
  std::vector<double> x;       // x[f * num_clients + j]
  std::vector<int> clients;    // clients the solution serves, sorted
  double objective_value = 0.0;

  double xv(int f, int j) const { return x[static_cast<std::size_t>(f) * num_clients + j]; }
  double& xv(int f, int j) { return x[static_cast<std::size_t>(f) * num_clients + j]; }
};

// An LP together with the variable layout used to read solutions back.
struct NaturalLp {
  LinearProgram lp;
  std::vector<int> y_var;   // per facility
  std::vector<int> x_var;   // per (f, j) as in FractionalSolution::x; -1 when absent
  std::vector<int> clients;
  int num_clients = 0;
};

// The natural relaxation with a cardinality row or matroid rank rows; knapsack
// instances get the plain budget row.
NaturalLp build_natural_lp(const Instance& instance);

// The strengthened knapsack relaxation over an extended instance whose radii
// are computed. Variables excluded by the radius and contribution rules are
// not created at all.
NaturalLp build_knapsack_lp(const ExtendedInstance& extended);

// Per-facility weighted star terms sum_j x_ij w_j (c_ij - r_j)^+.
std::vector<double> star_costs(const Instance& instance, const FractionalSolution& sol);

FractionalSolution read_solution(const NaturalLp& nlp, const Instance& instance, const BasicOptimal& point);

// Objective sum_j w_j sum_i x_ij (c_ij - r_j)^+ recomputed from scratch.
double fractional_objective(const Instance& instance, const FractionalSolution& sol);

// Feasibility of (x, y) for the natural relaxation; returns the worst violation.
double fractional_violation(const Instance& instance, const FractionalSolution& sol);

// Moves every client's assignment onto its nearest facilities: facilities are
// grouped by distance (ties broken by facility id), closer groups are filled
// to y, and the boundary group keeps the input proportions.
FractionalSolution make_distance_optimal(const FractionalSolution& sol, const Instance& instance);

struct FacilityCopy {
  int original = 0;
  int copy_index = 0;
};

// Outer balls over duplicated facilities. Radius levels and inner balls
// depend on the discretization and live in RoundState.
struct BallSystem {
  std::vector<FacilityCopy> copies;
  std::vector<double> y;                  // opening per copy
  std::vector<int> clients;               // client positions, one per ball
  std::vector<std::vector<int>> outer;    // F_j, sorted copy indices

  int num_copies() const { return static_cast<int>(copies.size()); }
  int num_balls() const { return static_cast<int>(clients.size()); }
  double mass(const std::vector<int>& set) const;
};

// Splits facilities at the distinct assignment values so that each x_ij is
// either 0 or the full opening of the copies assigned to j. Requires a
// distance-optimal solution only for the unit-mass property to be tight.
BallSystem duplicate_facilities(const FractionalSolution& sol, const Instance& instance);

// Duplication that keeps per-copy star costs balanced: for each facility the
// clients are processed in id order, and each takes the copies with the
// smallest current star cost, splitting the last one to match x_ij exactly.
BallSystem duplicate_star_balanced(const FractionalSolution& sol, const Instance& instance);

// Star cost of each copy: sum over balls containing it of w_j (c_ij - r_j)^+.
std::vector<double> copy_star_costs(const BallSystem& balls, const Instance& instance);

}  // namespace meddis
