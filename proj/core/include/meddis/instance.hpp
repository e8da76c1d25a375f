#pragma once

// Instance model for median clustering with per-client discounts.
//
// An instance consists of a finite metric over named sites, a subset of the
// sites acting as facilities, a subset acting as clients, a nonnegative
// discount r_j and weight w_j per client, and a constraint family restricting
// which facility sets may be opened. The objective of a facility set S is
//
//     sum_j w_j * (c(j, S) - multiplier * r_j)^+
//
// where c(j, S) is the distance from j to the nearest member of S.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace meddis {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an exhaustive enumeration would exceed its configured limit.
class GuardExceeded : public Error {
 public:
  GuardExceeded(const std::string& what, double projected)
      : Error(what), projected_(projected) {}
  double projected() const { return projected_; }

 private:
  double projected_;
};

inline constexpr double kTriangleTolerance = 1e-9;

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

struct MetricSpace {
  std::vector<std::string> ids;
  std::vector<double> dist;  // row-major, ids.size() squared

  std::size_t size() const { return ids.size(); }
  double operator()(std::size_t p, std::size_t q) const {
    return dist[p * ids.size() + q];
  }
  double& at(std::size_t p, std::size_t q) { return dist[p * ids.size() + q]; }
};

struct UniformMatroid {
  int rank = 0;
};

// Parts hold facility positions (indices into Instance::facilities).
struct PartitionMatroid {
  std::vector<std::vector<int>> parts;
  std::vector<int> caps;
};

// rank_table[mask] is the rank of the facility subset encoded by mask.
struct ExplicitMatroid {
  std::vector<int> rank_table;
};

using MatroidSpec = std::variant<UniformMatroid, PartitionMatroid, ExplicitMatroid>;

inline constexpr int kMaxExplicitMatroidSize = 20;

struct Cardinality {
  int k = 0;
};
struct Matroid {
  MatroidSpec spec;
};
// Facility weights live in Instance::facility_weights.
struct Knapsack {
  double budget = 0.0;
};

using ConstraintFamily = std::variant<Cardinality, Matroid, Knapsack>;

struct Instance {
  MetricSpace metric;
  std::vector<int> facilities;  // site indices
  std::vector<int> clients;     // site indices
  std::vector<double> discounts;
  std::vector<double> client_weights;
  std::vector<double> facility_weights;
  ConstraintFamily constraint = Cardinality{1};
  // Multiplier applied by normalize(); objectives in input units are value / scale.
  double scale = 1.0;

  int num_facilities() const { return static_cast<int>(facilities.size()); }
  int num_clients() const { return static_cast<int>(clients.size()); }

  double fc(int f, int j) const { return metric(facilities[f], clients[j]); }
  double ff(int f, int g) const { return metric(facilities[f], facilities[g]); }
  double cc(int j, int k) const { return metric(clients[j], clients[k]); }

  const std::string& facility_id(int f) const { return metric.ids[facilities[f]]; }
  const std::string& client_id(int j) const { return metric.ids[clients[j]]; }

  // Largest facility-client distance.
  double max_distance() const;
};

// Facility sets are sorted vectors of facility positions.
using FacilitySet = std::vector<int>;

struct Violation {
  std::string kind;  // "symmetry", "diagonal", "negative", "triangle", "normalization", ...
  std::string message;
  std::vector<std::string> sites;
};

std::vector<Violation> validate(const Instance& instance);

// Distance from client j to the nearest facility of a nonempty set.
double connection_distance(const Instance& instance, int j, std::span<const int> set);

double discounted_cost(const Instance& instance, std::span<const int> set,
                       double multiplier = 1.0);

Instance normalize(const Instance& instance);

// Rank of a facility subset under a matroid constraint.
int matroid_rank(const MatroidSpec& spec, int num_facilities, std::span<const int> set);

// Rank inequalities y(S) <= r(S) that describe the matroid polytope together
// with 0 <= y <= 1: the full set for uniform matroids, each part (and the
// loops) for partition matroids, and every nonempty flat for explicit ones.
struct RankConstraint {
  FacilitySet set;
  int rank = 0;
};
std::vector<RankConstraint> rank_constraints(const MatroidSpec& spec, int num_facilities);

// Exhaustive check of the rank axioms for explicit matroids; returns an empty
// string when they hold, otherwise a description of the first failure.
std::string check_rank_axioms(const ExplicitMatroid& matroid, int num_facilities);

// Builds the rank table of the matroid whose independent sets are all subsets
// of the listed sets.
ExplicitMatroid explicit_matroid_from_sets(const std::vector<std::vector<int>>& sets,
                                           int num_facilities);

bool is_feasible(const Instance& instance, std::span<const int> set);

enum class ConstraintKind { kCardinality, kMatroid, kKnapsack };
ConstraintKind constraint_kind(const Instance& instance);
const char* to_string(ConstraintKind kind);

struct GenerateParams {
  int num_facilities = 4;
  int num_clients = 6;
  ConstraintKind kind = ConstraintKind::kCardinality;
  int k = 2;                        // cardinality bound or matroid rank scale
  std::string matroid_type = "partition";  // uniform | partition | explicit
  double discount_scale = 0.5;
  std::uint64_t seed = 1;
};

Instance generate(const GenerateParams& params);

}  // namespace meddis
