#pragma once

// Knapsack-constrained median with discounts: estimate enumeration,
// sparsification into extended instances, the strengthened relaxation,
// rounding with virtual clients, and candidate selection.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meddis/extended_instance.hpp"
#include "meddis/fractional.hpp"
#include "meddis/instance.hpp"
#include "meddis/iterround.hpp"
#include "meddis/report.hpp"

namespace meddis {

struct KnapsackFactors {
  double sigma = 0.0;           // tau (3 tau - 1) / (tau - 1)
  double gamma = 0.0;           // delta / (2 sigma + delta)
  double eta = 0.0;             // delta + sigma
  double beta_lp = 0.0;         // (3 tau - 1) / ln tau
  double removed_factor = 0.0;  // (1 + delta) / (1 - delta)
  double alpha = 0.0;           // 3 sigma + 2 at delta = 2/3
  double beta = 0.0;            // max{5, beta_lp} + rho (7 sigma + 14/3) at delta = 2/3
};

KnapsackFactors knapsack_factors(double tau, double rho, double delta);

struct EstimatePair {
  double c0 = 0.0;
  double est = 0.0;
};

// (c0, EST) pairs: c0 ranges over the positive weighted single-client
// contributions, EST over c0 (1 + eps)^s for s = 0 .. ceil(log_{1+eps} n);
// c0 = 0 contributes the single pair (0, 0).
std::vector<EstimatePair> enumerate_estimates(const Instance& instance, double epsilon);

// The largest R (as a supremum) with
// sum_{j' in C', c(j, j') <= delta R} w_j' (R - r_j' / (1 - delta))^+ <= rho EST.
// Sets `capped` when the left side never exceeds the bound.
double compute_radius(const ExtendedInstance& extended, int j, bool* capped = nullptr);

// Fills extended.radius for every client of C'.
void compute_radii(ExtendedInstance& extended);

struct SparsifyCaps {
  int cap1 = 0;
  int cap2 = 0;
};

// ceil(1 / rho) and ceil(1 / (rho (1 - delta))).
SparsifyCaps theoretical_caps(double rho, double delta);

struct SparsifyOptions {
  SparsifyCaps caps;
  double max_candidates = 1e6;
  // Restricts the stream to instances the sparsification procedure can
  // produce for some optimum: F0 fits the budget, removal balls meet the
  // removal threshold and are centred at radii towards F0, and facilities of
  // F0 that are not heavy for their own clients are justified by a ball.
  bool prune = true;
};

std::vector<ExtendedInstance> sparsify_candidates(const Instance& instance, double rho, double delta, double est,
                                                  double c0, const SparsifyOptions& options);

// (1 - delta) / (1 + delta) * sum_{C \ C'} w_j (c_{jF0} - (1 + delta) / (1 - delta) r_j)^+.
double removed_term(const ExtendedInstance& extended);

struct KnapsackLp {
  NaturalLp nlp;
  FractionalSolution solution;
  double objective = 0.0;  // U
};

// Solves the strengthened relaxation; empty when it is infeasible.
std::optional<KnapsackLp> solve_knapsack_relaxation(const ExtendedInstance& extended);

struct KnapCandidate {
  ExtendedInstance extended;
  FacilitySet solution;
  double cost = 0.0;        // discounted cost at the knapsack alpha
  int fractional = 0;       // t
  double lp_objective = 0.0;
  double max_star = 0.0;    // over copies not co-located with F0
  double cover_deficit = 0.0;    // worst 1 - y'(nearby copies)
  double reroute_slack = 0.0;    // worst violation of the rerouting bounds
  double b = 0.0;
  std::vector<IterationRecord> trace;
};

// Resolves the fractional coordinates of a rounded vertex in place: a single
// one is closed; two summing to one become the lighter opened and the heavier
// closed. Returns the closed index, or -1 when y is already integral.
int resolve_fractional(std::vector<double>& y, const std::vector<double>& weights);

// Rounds an optimal strengthened relaxation into an integral candidate.
KnapCandidate round_extended(const ExtendedInstance& extended, const KnapsackLp& relaxed, double tau);

std::optional<KnapCandidate> solve_extended(const ExtendedInstance& extended, double tau);

struct KnapsackOptions {
  double tau = 1.9;
  double rho = 1.0 / 3.0;
  double delta = 2.0 / 3.0;
  double epsilon = 0.1;
  std::optional<int> cap1;  // theoretical value when unset
  std::optional<int> cap2;
  double max_candidates = 1e6;
  int jobs = 1;
  bool prune = true;
};

SolveReport solve_knapmeddis(const Instance& instance, const KnapsackOptions& options = {});

}  // namespace meddis
