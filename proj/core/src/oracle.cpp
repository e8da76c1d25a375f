#include "meddis/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace meddis {
namespace {

double cost_from_definition(const Instance& in, std::uint32_t mask, double multiplier) {
  double total = 0.0;
  for (int j = 0; j < in.num_clients(); ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int f = 0; f < in.num_facilities(); ++f)
      if (mask >> f & 1u) nearest = std::min(nearest, in.metric(in.facilities[f], in.clients[j]));
    const double term = nearest - multiplier * in.discounts[j];
    if (term > 0.0) total += in.client_weights[j] * term;
  }
  return total;
}

FacilitySet members(std::uint32_t mask, int n) {
  FacilitySet s;
  for (int f = 0; f < n; ++f)
    if (mask >> f & 1u) s.push_back(f);
  return s;
}

double candidate_count(const Instance& in) {
  const int n = in.num_facilities();
  if (const auto* c = std::get_if<Cardinality>(&in.constraint)) {
    double total = 0.0, term = 1.0;
    for (int s = 1; s <= std::min(c->k, n); ++s) {
      term = term * (n - s + 1) / s;
      total += term;
    }
    return total;
  }
  return std::ldexp(1.0, n) - 1.0;
}

bool admissible(const Instance& in, std::uint32_t mask) {
  const int size = std::popcount(mask);
  if (const auto* c = std::get_if<Cardinality>(&in.constraint)) return size <= c->k;
  if (const auto* k = std::get_if<Knapsack>(&in.constraint)) {
    double w = 0.0;
    for (int f = 0; f < in.num_facilities(); ++f)
      if (mask >> f & 1u) w += in.facility_weights[f];
    return w <= k->budget + 1e-9;
  }
  const auto& m = std::get<Matroid>(in.constraint);
  const FacilitySet s = members(mask, in.num_facilities());
  return matroid_rank(m.spec, in.num_facilities(), s) == size;
}

}  // namespace

OracleResult brute_opt(const Instance& in, double guard, int jobs) {
  const int n = in.num_facilities();
  if (n > 30) throw GuardExceeded("brute force over more than 30 facilities", std::ldexp(1.0, n));
  const double count = candidate_count(in);
  if (count > guard) throw GuardExceeded("brute force would examine " + std::to_string(count) + " sets", count);

  const std::uint32_t end = std::uint32_t{1} << n;
  jobs = std::max(1, jobs);
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::uint32_t mask = 0;
    std::uint64_t enumerated = 0;
  };
  std::vector<Best> shards(jobs);
  auto scan = [&](int shard) {
    Best& best = shards[shard];
    for (std::uint32_t mask = 1 + shard; mask < end; mask += jobs) {
      if (!admissible(in, mask)) continue;
      ++best.enumerated;
      const double v = cost_from_definition(in, mask, 1.0);
      if (v < best.value || (v == best.value && members(mask, n) < members(best.mask, n))) {
        best.value = v;
        best.mask = mask;
      }
    }
  };
  if (jobs == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> pool;
    for (int s = 0; s < jobs; ++s) pool.emplace_back(scan, s);
  }
  Best total;
  for (const auto& b : shards) {
    total.enumerated += b.enumerated;
    if (b.enumerated == 0) continue;
    if (total.mask == 0 || b.value < total.value ||
        (b.value == total.value && members(b.mask, n) < members(total.mask, n))) {
      total.value = b.value;
      total.mask = b.mask;
    }
  }
  if (total.mask == 0) throw Error("no nonempty feasible facility set");
  return {members(total.mask, n), total.value, total.enumerated};
}

OracleResult brute_stochastic_opt(const StochasticInstance& stoch, double guard) {
  const Instance& in = stoch.base;
  const int n = in.num_facilities();
  if (n > 30) throw GuardExceeded("brute force over more than 30 facilities", std::ldexp(1.0, n));
  const double work = candidate_count(in) * realization_count(stoch);
  if (work > guard) throw GuardExceeded("stochastic brute force would take " + std::to_string(work) + " steps", work);
  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    if (!admissible(in, mask)) continue;
    ++best.enumerated;
    const FacilitySet s = members(mask, n);
    const double v = expected_max_exact(stoch, s, guard);
    if (v < best.value) {
      best.value = v;
      best.optimum = s;
    }
  }
  if (best.optimum.empty()) throw Error("no nonempty feasible facility set");
  return best;
}

BicriteriaCheck check_bicriteria(const Instance& in, std::span<const int> solution, double alpha, double beta,
                                 double guard) {
  if (solution.empty()) throw Error("the solution is empty");
  const OracleResult opt = brute_opt(in, guard);
  std::uint32_t mask = 0;
  for (int f : solution) mask |= std::uint32_t{1} << f;
  BicriteriaCheck c;
  c.opt = opt.value;
  c.opt_set = opt.optimum;
  c.lhs = cost_from_definition(in, mask, alpha);
  c.rhs = beta * opt.value;
  c.holds = c.lhs <= c.rhs + 1e-6;
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

nlohmann::json to_json(const BicriteriaCheck& c, const Instance& in) {
  std::vector<std::string> ids;
  for (int f : c.opt_set) ids.push_back(in.facility_id(f));
  return {{"opt", c.opt}, {"optSet", ids}, {"lhs", c.lhs}, {"rhs", c.rhs},
          {"holds", c.holds}, {"alpha", c.alpha}, {"beta", c.beta}};
}

}  // namespace meddis
