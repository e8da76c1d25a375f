#pragma once

// Unassigned stochastic center: independent points, each realizing at one of
// a few client locations (or not at all). The objective of a facility set S
// is E[max_v c(tau(v), S)], with the max over no realized points taken as 0.
//
// The solver sweeps a uniform discount T downwards and solves the median
// problem with discounts T and client weights p_j = Pr[some point lands on j].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meddis/instance.hpp"
#include "meddis/knapsack.hpp"
#include "meddis/report.hpp"

namespace meddis {

struct StochasticPoint {
  std::string id;
  std::vector<std::pair<int, double>> dist;  // (client position, probability)
};

struct StochasticInstance {
  Instance base;  // discounts are ignored
  std::vector<StochasticPoint> points;
};

std::vector<std::string> validate(const StochasticInstance& stoch);

StochasticInstance stochastic_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const StochasticInstance& stoch);

// p_j = 1 - prod_v (1 - q_{v,j}).
std::vector<double> realization_probs(const StochasticInstance& stoch);

inline constexpr double kMaxRealizations = 1e6;

// Size of the joint outcome space, counting "does not realize" when a point's
// probabilities sum to less than one.
double realization_count(const StochasticInstance& stoch);

// Exact expectation by enumerating all joint outcomes; throws GuardExceeded
// over `guard` outcomes.
double expected_max_exact(const StochasticInstance& stoch, std::span<const int> set,
                          double guard = kMaxRealizations);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

MonteCarloEstimate expected_max_montecarlo(const StochasticInstance& stoch, std::span<const int> set, int samples,
                                           std::uint64_t seed);

// Exact when the outcome space is within the guard, Monte Carlo otherwise.
double expected_max(const StochasticInstance& stoch, std::span<const int> set, std::uint64_t seed = 1);

// The uniform-discount, probability-weighted median instance for threshold T.
Instance threshold_instance(const StochasticInstance& stoch, double threshold);

struct StochasticOptions {
  std::optional<double> tau;  // per constraint family when unset
  double epsilon = 0.2;
  KnapsackOptions knapsack;
  std::uint64_t seed = 1;
};

struct SweepStep {
  double threshold = 0.0;
  double cost = 0.0;   // discounted cost at alpha * T
  double bound = 0.0;  // beta * T
  bool accepted = false;
};

struct StochasticReport {
  FacilitySet solution_positions;
  std::vector<std::string> solution;
  double threshold = 0.0;  // T*
  double alpha = 0.0;
  double beta = 0.0;       // solver factor used in the acceptance test
  double guarantee = 0.0;  // 3 (1 + 2 eps) (alpha + beta)
  double expected_max = 0.0;
  bool exact = true;
  std::vector<SweepStep> sweep;
  SolveReport inner;
  std::vector<Certificate> certificates;
  std::vector<std::string> flags;

  bool all_hold() const;
};

nlohmann::json to_json(const StochasticReport& report);

struct StochasticParams {
  GenerateParams base;  // discounts are forced to zero
  int num_points = 4;
  int support = 2;      // locations per point, at most the client count
};

// Deterministic for a fixed seed; each point realizes with total probability
// drawn from [0.3, 1].
StochasticInstance generate_stochastic(const StochasticParams& params);

StochasticReport solve_stochastic_center(const StochasticInstance& stoch, const StochasticOptions& options = {});

}  // namespace meddis
