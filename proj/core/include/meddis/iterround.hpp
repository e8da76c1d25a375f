#pragma once

// Iterative rounding over ball systems and the cardinality / matroid solvers
// built on it.

#include <string>
#include <vector>

#include "meddis/discretize.hpp"
#include "meddis/fractional.hpp"
#include "meddis/instance.hpp"
#include "meddis/lp.hpp"
#include "meddis/report.hpp"

namespace meddis {

inline constexpr double kIntegralityTolerance = 1e-7;

// Guarantees of the rounding with step size h: every client ends within
// radius_coefficient * D_l of an open facility, and the output is an
// (alpha, beta) bi-criteria solution.
struct RoundingFactors {
  double radius_coefficient = 0.0;  // (3 tau^h - 1) / (tau^h - 1)
  double alpha = 0.0;               // tau * radius_coefficient
  double beta = 0.0;                // radius_coefficient * (tau - 1) / ln tau
};

RoundingFactors rounding_factors(double tau, int h);

// A client as seen by the rounding: a real client, or a virtual one pinning
// unit mass on the copies of a pre-selected facility.
struct RoundClient {
  int client = -1;  // client position; -1 for virtual clients
  std::string label;
  double weight = 1.0;
  double discount = 0.0;
  std::vector<int> outer;  // F_j, sorted copy indices
  std::vector<int> inner;  // B_j
  int level = -1;          // l_j
  bool in_c0 = false;
  bool in_cstar = false;

  bool is_virtual() const { return client < 0; }
};

struct RoundState {
  const Instance* instance = nullptr;
  DiscretizedMetric levels{2.0, 0.0};
  std::vector<FacilityCopy> copies;
  std::vector<RoundClient> clients;
  int h = 2;
  LinearProgram current_lp;
  BasicOptimal current_vertex;

  // Level of the rounded distance between a copy and a round client.
  int pair_level(int e, int copy) const;
  double pair_rounded(int e, int copy) const { return levels.level_value(pair_level(e, copy)); }
  std::vector<int> inner_ball(int e) const;
};

// Builds the initial state: every real ball starts in C0 with its radius level
// and inner ball computed; virtual clients (one per copy group in
// `virtual_groups`) start at level -1 in C1 and C*.
RoundState make_round_state(const BallSystem& balls, const Instance& instance, const DiscretizedMetric& levels,
                            int h, const std::vector<std::vector<int>>& virtual_groups = {});

// The auxiliary LP of the current state over copy openings.
LinearProgram build_aux_lp(const RoundState& state);

// Contribution of one round client to the auxiliary objective at y.
double aux_contribution(const RoundState& state, int e, const std::vector<double>& y);

// Adds e to C* unless a member of C* at the same or a lower level overlaps
// it; on adding, evicts overlapping members at least h levels above.
// Returns whether e was added.
bool update_cstar(RoundState& state, int e);

// Pairs in C* that overlap while their levels differ by h or more.
int cstar_violations(const RoundState& state);

struct IterRoundResult {
  std::vector<double> y;  // final vertex, per copy
  std::vector<IterationRecord> trace;
  std::vector<double> objectives;  // LP objective at every solve
  double max_contribution_change = 0.0;
  int max_cstar_violations = 0;
};

// The iterative rounding loop. When `require_integral` is set the final vertex must be
// integral; otherwise an Error carrying a state dump is thrown.
IterRoundResult iter_round(RoundState& state, bool require_integral);

// (3 tau^h - 1) / (tau^h - 1) * D_{l_j} for the final level of e.
double nearest_open_distance_bound(const RoundState& state, int e);

std::string dump_state(const RoundState& state, const std::vector<double>& y);

// Copies opened by an integral vertex, collapsed to original facilities.
FacilitySet opened_facilities(const RoundState& state, const std::vector<double>& y);

SolveReport solve_kmeddis(const Instance& instance, double tau = 1.91, int h = 2);
SolveReport solve_matmeddis(const Instance& instance, double tau = 2.36, int h = 1);

}  // namespace meddis
