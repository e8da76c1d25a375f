#include "meddis/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "meddis/io.hpp"
#include "meddis/solver.hpp"

namespace meddis {
namespace {

using nlohmann::json;

// Outcomes of one point: (client position or -1, probability).
std::vector<std::pair<int, double>> outcomes(const StochasticPoint& point) {
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  for (const auto& [j, q] : point.dist)
    if (q > 0.0) {
      out.emplace_back(j, q);
      total += q;
    }
  if (total < 1.0) out.emplace_back(-1, 1.0 - total);
  return out;
}

std::vector<double> client_distances(const Instance& in, std::span<const int> set) {
  if (set.empty()) throw Error("the facility set is empty");
  std::vector<double> d(in.num_clients());
  for (int j = 0; j < in.num_clients(); ++j) d[j] = connection_distance(in, j, set);
  return d;
}

}  // namespace

std::vector<std::string> validate(const StochasticInstance& stoch) {
  std::vector<std::string> problems;
  for (const auto& v : validate(stoch.base)) problems.push_back(v.message);
  for (const auto& point : stoch.points) {
    double total = 0.0;
    for (const auto& [j, q] : point.dist) {
      if (j < 0 || j >= stoch.base.num_clients()) problems.push_back("point " + point.id + " lands outside the clients");
      if (!(q >= 0.0 && q <= 1.0)) problems.push_back("point " + point.id + " has a probability outside [0, 1]");
      total += q;
    }
    if (total > 1.0 + 1e-9) problems.push_back("point " + point.id + " has probabilities summing above 1");
  }
  return problems;
}

StochasticInstance stochastic_from_json(const json& doc) {
  StochasticInstance stoch;
  if (!doc.is_object() || !doc.contains("clients")) throw SchemaError("stochastic instance: missing 'clients'");
  json base = doc;
  for (auto& c : base["clients"])
    if (c.is_object() && !c.contains("discount")) c["discount"] = 0.0;
  stoch.base = instance_from_json(base);
  std::fill(stoch.base.discounts.begin(), stoch.base.discounts.end(), 0.0);
  std::map<std::string, int> client_of;
  for (int j = 0; j < stoch.base.num_clients(); ++j) client_of[stoch.base.client_id(j)] = j;
  if (!doc.contains("points") || !doc.at("points").is_array()) throw SchemaError("stochastic instance: missing 'points'");
  for (const auto& p : doc.at("points")) {
    StochasticPoint point;
    point.id = p.at("id").get<std::string>();
    for (const auto& [id, q] : p.at("dist").items()) {
      const auto it = client_of.find(id);
      if (it == client_of.end()) throw SchemaError("point " + point.id + ": unknown client '" + id + "'");
      point.dist.emplace_back(it->second, q.get<double>());
    }
    std::sort(point.dist.begin(), point.dist.end());
    stoch.points.push_back(std::move(point));
  }
  return stoch;
}

json to_json(const StochasticInstance& stoch) {
  json doc = to_json(stoch.base);
  doc["points"] = json::array();
  for (const auto& point : stoch.points) {
    json dist = json::object();
    for (const auto& [j, q] : point.dist) dist[stoch.base.client_id(j)] = q;
    doc["points"].push_back({{"id", point.id}, {"dist", dist}});
  }
  return doc;
}

std::vector<double> realization_probs(const StochasticInstance& stoch) {
  std::vector<double> miss(stoch.base.num_clients(), 1.0);
  for (const auto& point : stoch.points)
    for (const auto& [j, q] : point.dist) miss[j] *= 1.0 - q;
  std::vector<double> p(miss.size());
  for (std::size_t j = 0; j < miss.size(); ++j) p[j] = 1.0 - miss[j];
  return p;
}

double realization_count(const StochasticInstance& stoch) {
  double count = 1.0;
  for (const auto& point : stoch.points) count *= static_cast<double>(outcomes(point).size());
  return count;
}

double expected_max_exact(const StochasticInstance& stoch, std::span<const int> set, double guard) {
  const double count = realization_count(stoch);
  if (count > guard)
    throw GuardExceeded("exact expectation needs " + std::to_string(count) + " outcomes", count);
  const std::vector<double> d = client_distances(stoch.base, set);
  std::vector<std::vector<std::pair<int, double>>> per_point;
  for (const auto& point : stoch.points) per_point.push_back(outcomes(point));

  double total = 0.0;
  auto walk = [&](auto&& self, std::size_t v, double prob, double worst) -> void {
    if (prob == 0.0) return;
    if (v == per_point.size()) {
      total += prob * worst;
      return;
    }
    for (const auto& [j, q] : per_point[v]) self(self, v + 1, prob * q, j < 0 ? worst : std::max(worst, d[j]));
  };
  walk(walk, 0, 1.0, 0.0);
  return total;
}

MonteCarloEstimate expected_max_montecarlo(const StochasticInstance& stoch, std::span<const int> set, int samples,
                                           std::uint64_t seed) {
  if (samples <= 0) throw Error("Monte Carlo needs a positive sample count");
  const std::vector<double> d = client_distances(stoch.base, set);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    double worst = 0.0;
    for (const auto& point : stoch.points) {
      double u = unit(rng);
      for (const auto& [j, q] : point.dist) {
        if (u < q) {
          worst = std::max(worst, d[j]);
          break;
        }
        u -= q;
      }
    }
    sum += worst;
    sum_sq += worst * worst;
  }
  const double mean = sum / samples;
  const double var = std::max(0.0, sum_sq / samples - mean * mean);
  return {mean, std::sqrt(var / samples)};
}

double expected_max(const StochasticInstance& stoch, std::span<const int> set, std::uint64_t seed) {
  if (realization_count(stoch) <= kMaxRealizations) return expected_max_exact(stoch, set);
  return expected_max_montecarlo(stoch, set, 100000, seed).mean;
}

Instance threshold_instance(const StochasticInstance& stoch, double threshold) {
  Instance in = stoch.base;
  in.client_weights = realization_probs(stoch);
  std::fill(in.discounts.begin(), in.discounts.end(), threshold);
  return in;
}

StochasticInstance generate_stochastic(const StochasticParams& params) {
  if (params.num_points < 0 || params.support < 1) throw Error("need a nonnegative point count and support >= 1");
  GenerateParams gp = params.base;
  gp.discount_scale = 0.0;
  StochasticInstance stoch;
  stoch.base = generate(gp);
  std::mt19937_64 rng(params.base.seed * 0x9E3779B97F4A7C15ull + 17);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const int nc = stoch.base.num_clients();
  const int support = std::min(params.support, nc);
  for (int v = 0; v < params.num_points; ++v) {
    StochasticPoint point;
    point.id = "v" + std::to_string(v);
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < support; ++i) std::swap(order[i], order[i + static_cast<int>(rng() % (nc - i))]);
    std::vector<double> raw(support);
    double sum = 0.0;
    for (double& r : raw) sum += r = 0.1 + unit();
    const double total = 0.3 + 0.7 * unit();
    for (int i = 0; i < support; ++i) point.dist.emplace_back(order[i], total * raw[i] / sum);
    std::sort(point.dist.begin(), point.dist.end());
    stoch.points.push_back(std::move(point));
  }
  return stoch;
}

bool StochasticReport::all_hold() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.holds; });
}

json to_json(const StochasticReport& r) {
  json out;
  out["solution"] = r.solution;
  out["threshold"] = r.threshold;
  out["alpha"] = r.alpha;
  out["beta"] = r.beta;
  out["guarantee"] = r.guarantee;
  out["expected_max"] = r.expected_max;
  out["exact"] = r.exact;
  out["sweep"] = json::array();
  for (const auto& s : r.sweep)
    out["sweep"].push_back({{"threshold", s.threshold}, {"cost", s.cost}, {"bound", s.bound}, {"accepted", s.accepted}});
  out["inner"] = to_json(r.inner);
  out["certificates"] = json::array();
  for (const auto& c : r.certificates)
    out["certificates"].push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  if (!r.flags.empty()) out["flags"] = r.flags;
  return out;
}

StochasticReport solve_stochastic_center(const StochasticInstance& stoch, const StochasticOptions& opt) {
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
  {
    const auto problems = validate(stoch);
    if (!problems.empty()) throw Error("invalid stochastic instance: " + problems.front());
  }
  const Instance& base = stoch.base;
  const ConstraintKind kind = constraint_kind(base);
  SolveOptions sopt;
  sopt.knapsack = opt.knapsack;
  sopt.tau = opt.tau.value_or(kind == ConstraintKind::kCardinality ? 1.91
                              : kind == ConstraintKind::kMatroid   ? 1.985
                                                                   : opt.knapsack.tau);
  // The knapsack solver is measured against its estimate grid, which costs
  // an extra (1 + eps) against the optimum.
  const double slack = kind == ConstraintKind::kKnapsack ? 1.0 + opt.knapsack.epsilon : 1.0;

  const std::vector<double> p = realization_probs(stoch);
  double p_min = 1.0;
  bool any = false;
  for (double q : p)
    if (q > 0.0) {
      p_min = std::min(p_min, q);
      any = true;
    }
  double d_min = std::numeric_limits<double>::infinity();
  for (double d : base.metric.dist)
    if (d > 0.0) d_min = std::min(d_min, d);

  StochasticReport report;
  auto attempt = [&](double threshold, SweepStep& step) {
    const Instance in = threshold_instance(stoch, threshold);
    SolveReport inner = solve_instance(in, sopt);
    step.threshold = threshold;
    step.cost = discounted_cost(in, inner.solution_positions, inner.alpha);
    step.bound = inner.beta * slack * threshold;
    step.accepted = step.cost <= step.bound * (1.0 + 1e-9) + 1e-12;
    return inner;
  };
  auto take = [&](SolveReport inner, double threshold) {
    report.inner = std::move(inner);
    report.threshold = threshold;
    report.alpha = report.inner.alpha;
    report.beta = report.inner.beta * slack;
  };

  if (!any) {
    // Nothing ever realizes: every feasible set has expectation 0.
    SweepStep step;
    take(attempt(0.0, step), 0.0);
    report.sweep.push_back(step);
    report.flags.push_back("no_realizations");
  } else {
    // Below p_min * d_min a positive optimum cannot exist, so the sweep may
    // stop there and fall back to T = 0.
    const double floor = p_min * d_min;
    double threshold = base.max_distance();
    bool failed = false;
    while (threshold >= floor) {
      SweepStep step;
      SolveReport inner = attempt(threshold, step);
      report.sweep.push_back(step);
      if (!step.accepted) {
        failed = true;
        break;
      }
      take(std::move(inner), threshold);
      threshold *= 1.0 - opt.epsilon;
    }
    if (report.sweep.empty() || !report.sweep.front().accepted) {
      if (report.sweep.empty()) throw Error("stochastic sweep evaluated no threshold");
      throw Error("the sweep rejected its starting threshold");
    }
    if (!failed) {
      SweepStep step;
      SolveReport inner = attempt(0.0, step);
      report.sweep.push_back(step);
      if (step.accepted) {
        take(std::move(inner), 0.0);
        report.flags.push_back("zero_threshold");
      } else {
        report.flags.push_back("sweep_floor_reached");
      }
    }
  }

  report.solution_positions = report.inner.solution_positions;
  report.solution = report.inner.solution;
  report.guarantee = 3.0 * (1.0 + 2.0 * opt.epsilon) * (report.alpha + report.beta);
  report.exact = realization_count(stoch) <= kMaxRealizations;
  report.expected_max = expected_max(stoch, report.solution_positions, opt.seed);

  const Instance at_star = threshold_instance(stoch, report.threshold);
  const double cost = discounted_cost(at_star, report.solution_positions, report.alpha);
  auto& certs = report.certificates;
  certs.push_back(certify("sweep_acceptance", cost, report.beta * report.threshold));
  if (report.exact) {
    // E[max] <= alpha T + sum_j p_j (c_jS - alpha T)^+.
    certs.push_back(certify("expected_max_chain", report.expected_max, report.alpha * report.threshold + cost));
  }
  certs.push_back(certify("feasible", is_feasible(base, report.solution_positions) ? 0.0 : 1.0, 0.0, 0.0));
  for (const auto& c : report.inner.certificates)
    if (!c.holds) certs.push_back({"inner_" + c.name, c.lhs, c.rhs, false});
  return report;
}

}  // namespace meddis
