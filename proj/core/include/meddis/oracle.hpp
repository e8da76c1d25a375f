#pragma once

// Exhaustive solvers for desk-scale instances and the bi-criteria check.
// Objectives here are evaluated from the definition, independently of the
// solver code paths.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "meddis/instance.hpp"
#include "meddis/stochastic.hpp"

namespace meddis {

inline constexpr double kOracleGuard = 1e6;

struct OracleResult {
  FacilitySet optimum;
  double value = 0.0;
  std::uint64_t enumerated = 0;  // feasible sets examined
};

// Minimum discounted cost (multiplier 1) over nonempty feasible sets. The
// guard bounds the number of candidate sets, counted before enumerating.
OracleResult brute_opt(const Instance& instance, double guard = kOracleGuard, int jobs = 1);

// Minimum exact expected max over nonempty feasible sets; the guard bounds
// candidate sets times joint outcomes.
OracleResult brute_stochastic_opt(const StochasticInstance& stoch, double guard = kOracleGuard);

struct BicriteriaCheck {
  double opt = 0.0;
  FacilitySet opt_set;
  double lhs = 0.0;  // discounted cost of the solution at multiplier alpha
  double rhs = 0.0;  // beta * opt
  bool holds = false;
  double alpha = 0.0;
  double beta = 0.0;
};

BicriteriaCheck check_bicriteria(const Instance& instance, std::span<const int> solution, double alpha, double beta,
                                 double guard = kOracleGuard);

nlohmann::json to_json(const BicriteriaCheck& check, const Instance& instance);

}  // namespace meddis
