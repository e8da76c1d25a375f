// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "meddis/iterround.hpp"
#include "meddis/knapsack.hpp"
#include "meddis/oracle.hpp"
#include "meddis/stochastic.hpp"
#include "oracles.hpp"

using namespace meddis;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Instance random_instance(std::uint64_t seed, ConstraintKind kind, int max_f, int max_c, int max_k,
                         const std::string& matroid = "partition") {
  GenerateParams g;
  g.seed = seed;
  g.kind = kind;
  g.matroid_type = matroid;
  g.num_facilities = 3 + static_cast<int>(seed % (max_f - 2));
  g.num_clients = 3 + static_cast<int>((seed * 7) % (max_c - 2));
  g.k = 1 + static_cast<int>(seed % max_k);
  g.discount_scale = seed % 4 == 0 ? 0.0 : 0.5;
  return generate(g);
}

// Rounding pipeline with access to the final state.
struct Rounded {
  Instance in;
  RoundState state;
  IterRoundResult result;
  double lp_opt = 0.0;
  double offset_objective = 0.0;
  std::vector<OffsetInput> pairs;
};

Rounded round_instance(const Instance& input, double tau, int h) {
  Rounded r;
  r.in = normalize(input);
  const NaturalLp nlp = build_natural_lp(r.in);
  const LpResult lp = solve(nlp.lp);
  if (!lp.optimal()) throw Error("natural relaxation not optimal");
  r.lp_opt = lp.solution.objective_value;
  const FractionalSolution sol = make_distance_optimal(read_solution(nlp, r.in, lp.solution), r.in);
  const BallSystem balls = duplicate_facilities(sol, r.in);
  for (int b = 0; b < balls.num_balls(); ++b)
    for (int c : balls.outer[b]) {
      const int j = balls.clients[b];
      r.pairs.push_back({r.in.fc(balls.copies[c].original, j), r.in.discounts[j], balls.y[c] * r.in.client_weights[j]});
    }
  const OffsetChoice offset = choose_offset(r.pairs, tau);
  r.offset_objective = offset.objective;
  r.state = make_round_state(balls, r.in, DiscretizedMetric(tau, offset.b), h);
  r.result = iter_round(r.state, false);
  return r;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome kmeddis_guarantee() {
  Outcome o;
  const std::pair<double, std::pair<double, double>> runs[] = {{1.91, {7.173, 5.281}}, {1.592, {6.851, 5.479}}};
  std::ostringstream d;
  for (const auto& [tau, ab] : runs) {
    double worst = 0.0;
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Instance in = random_instance(seed, ConstraintKind::kCardinality, 8, 12, 4);
      const SolveReport r = solve_kmeddis(in, tau);
      const double opt = brute_opt(in).value;
      const double lhs = discounted_cost(in, r.solution_positions, ab.first);
      const bool feasible = static_cast<int>(r.solution_positions.size()) <= std::get<Cardinality>(in.constraint).k;
      if (!(lhs <= ab.second * opt + 1e-6) || !feasible || !r.all_hold()) ++failures;
      if (opt > 0) worst = std::max(worst, lhs / opt);
    }
    o.pass = o.pass && failures == 0;
    d << "tau " << tau << ": " << failures << " failures, worst lhs/opt " << fmt("%.3f", worst) << " vs beta "
      << ab.second << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome discretization_bound() {
  Outcome o;
  int runs = 0, failures = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    for (double tau : {1.91, 1.592}) {
      const Rounded r = round_instance(random_instance(seed, ConstraintKind::kCardinality, 8, 12, 4), tau, 2);
      ++runs;
      if (!(r.offset_objective <= (tau - 1) / std::log(tau) * r.lp_opt + 1e-7 * std::max(1.0, r.lp_opt))) ++failures;
    }
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int pair_failures = 0;
  const int pairs = 40, samples = 100000;
  for (int p = 0; p < pairs; ++p) {
    const double tau = p % 2 ? 1.91 : 2.36;
    const double c = 1.0 + 99.0 * unit(rng), r = c * unit(rng);
    double sum = 0.0, sq = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double v = positive_part(DiscretizedMetric(tau, unit(rng)).rounded(c) - tau * r);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / samples;
    const double sigma = std::sqrt(std::max(0.0, sq / samples - mean * mean) / samples);
    if (mean > (tau - 1) / std::log(tau) * positive_part(c - r) + 3 * sigma) ++pair_failures;
  }
  o.pass = failures == 0 && pair_failures == 0;
  o.detail = std::to_string(runs) + " runs with " + std::to_string(failures) + " offset violations; " +
             std::to_string(pairs) + " Monte Carlo pairs with " + std::to_string(pair_failures) + " outside 3 sigma";
  return o;
}

Outcome rounding_invariants() {
  Outcome o;
  std::ostringstream d;
  for (int h : {2, 1}) {
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Instance in = h == 2 ? random_instance(seed, ConstraintKind::kCardinality, 8, 12, 4)
                                 : random_instance(seed, ConstraintKind::kMatroid, 8, 12, 4);
      const Rounded r = round_instance(in, h == 2 ? 1.91 : 2.36, h);
      bool ok = r.result.max_cstar_violations == 0 && cstar_violations(r.state) == 0;
      for (std::size_t t = 1; t < r.result.objectives.size(); ++t)
        ok = ok && r.result.objectives[t] <= r.result.objectives[t - 1] + 1e-7 * std::max(1.0, r.result.objectives[t - 1]);
      for (double y : r.result.y) ok = ok && (y <= 1e-7 || y >= 1 - 1e-7);
      const FacilitySet open = opened_facilities(r.state, r.result.y);
      ok = ok && !open.empty();
      const double th = std::pow(r.state.levels.tau(), h);
      for (const auto& rc : r.state.clients) {
        double reach = 1e300;
        for (int f : open) reach = std::min(reach, r.in.fc(f, rc.client));
        const double bound = rc.level < 0 ? 0.0 : (3 * th - 1) / (th - 1) * r.state.levels.level_value(rc.level);
        ok = ok && reach <= bound + 1e-9 && !rc.in_c0;
      }
      if (!ok) ++failures;
    }
    o.pass = o.pass && failures == 0;
    d << "h=" << h << ": " << failures << "/100 runs violate; ";
  }
  o.detail = d.str();
  return o;
}

Outcome matmeddis_guarantee() {
  Outcome o;
  int failures = 0, runs = 0;
  double worst = 0.0;
  auto check = [&](const Instance& in) {
    ++runs;
    const SolveReport r = solve_matmeddis(in, 2.36);
    const auto& spec = std::get<Matroid>(in.constraint).spec;
    const bool independent =
        matroid_rank(spec, in.num_facilities(), r.solution_positions) == static_cast<int>(r.solution_positions.size());
    const double opt = brute_opt(in).value;
    const double lhs = discounted_cost(in, r.solution_positions, 10.551);
    if (!independent || !(lhs <= 7.081 * opt + 1e-6) || !r.all_hold()) ++failures;
    if (opt > 0) worst = std::max(worst, lhs / opt);
  };
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    check(random_instance(seed, ConstraintKind::kMatroid, 10, 12, 4, "partition"));
  for (std::uint64_t seed = 101; seed <= 120; ++seed)
    check(random_instance(seed, ConstraintKind::kMatroid, 10, 12, 4, "explicit"));
  o.pass = failures == 0;
  o.detail = std::to_string(runs) + " instances, " + std::to_string(failures) + " failures, worst lhs/opt " +
             fmt("%.3f", worst) + " vs 7.081";
  return o;
}

Outcome knapmeddis_pipeline() {
  Outcome o;
  KnapsackOptions opt;
  opt.tau = 1.9;
  opt.rho = 0.5;
  opt.delta = 2.0 / 3.0;
  opt.epsilon = 0.25;
  opt.jobs = 4;
  int failures = 0, runs = 0;
  double worst = 0.0, beta = 0.0, alpha = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = random_instance(seed, ConstraintKind::kKnapsack, 6, 8, 3);
    ++runs;
    const SolveReport r = solve_knapmeddis(in, opt);
    alpha = r.alpha;
    beta = r.beta;
    const double opt2 = brute_opt(in).value;
    const double lhs = discounted_cost(in, r.solution_positions, r.alpha);
    bool ok = lhs <= r.beta * (1 + opt.epsilon) * opt2 + 1e-6 && r.all_hold();
    double w = 0.0;
    for (int f : r.solution_positions) w += in.facility_weights[f];
    ok = ok && w <= std::get<Knapsack>(in.constraint).budget + 1e-9;
    for (const auto& c : r.candidates) {
      ok = ok && c.fractional >= 0 && c.fractional <= 2;
      for (const auto& f : c.f0) ok = ok && std::find(c.solution.begin(), c.solution.end(), f) != c.solution.end();
    }
    ok = ok && r.find("star_bound") && r.find("star_bound")->holds;
    if (!ok) ++failures;
    if (opt2 > 0) worst = std::max(worst, lhs / opt2);
  }
  o.pass = failures == 0;
  o.detail = std::to_string(runs) + " instances, " + std::to_string(failures) + " failures, alpha " +
             fmt("%.3f", alpha) + ", worst lhs/opt " + fmt("%.3f vs beta(1+eps) %.3f", worst, beta * 1.25);
  return o;
}

// Two planted clusters around facilities f0 and f1 on the plane; the budget
// admits both, decoys are heavier or far.
Instance planted_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int nf = 4 + static_cast<int>(seed % 3), nc = 5 + static_cast<int>(seed % 4);
  std::vector<std::pair<double, double>> pts;
  for (int f = 0; f < nf; ++f) pts.emplace_back(100 * unit(rng), 100 * unit(rng));
  for (int j = 0; j < nc; ++j) {
    const auto& c = pts[j % 2];
    pts.emplace_back(c.first + 20 * (unit(rng) - 0.5), c.second + 20 * (unit(rng) - 0.5));
  }
  Instance in;
  const std::size_t n = pts.size();
  for (int f = 0; f < nf; ++f) in.metric.ids.push_back("f" + std::to_string(f));
  for (int j = 0; j < nc; ++j) in.metric.ids.push_back("c" + std::to_string(j));
  in.metric.dist.resize(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      in.metric.at(p, q) = p == q ? 0.0 : std::max(1.0, std::hypot(pts[p].first - pts[q].first, pts[p].second - pts[q].second));
  // Clamp to a metric: shortest paths.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) in.metric.at(p, q) = std::min(in.metric(p, q), in.metric(p, k) + in.metric(k, q));
  for (int f = 0; f < nf; ++f) in.facilities.push_back(f);
  for (int j = 0; j < nc; ++j) in.clients.push_back(nf + j);
  for (int j = 0; j < nc; ++j) in.discounts.push_back(5 * unit(rng));
  in.client_weights.assign(nc, 1.0);
  for (int f = 0; f < nf; ++f) in.facility_weights.push_back(f < 2 ? 1.0 : 1.0 + 2 * unit(rng));
  in.constraint = Knapsack{2.0};
  return in;
}

Outcome sparsification_existence() {
  Outcome o;
  const double rho = 0.5, delta = 2.0 / 3.0, eps = 0.25;
  int found = 0, zero = 0;
  std::string first_failure;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = planted_instance(seed);
    if (!validate(in).empty()) {
      first_failure = "planted instance " + std::to_string(seed) + " invalid";
      continue;
    }
    const OracleResult best = brute_opt(in);
    if (best.value == 0.0) ++zero;
    SparsifyOptions so;
    so.caps = theoretical_caps(rho, delta);
    bool ok = false;
    for (const auto& p : enumerate_estimates(in, eps)) {
      if (p.est < best.value - 1e-9 || p.est > (1 + eps) * best.value + 1e-9) continue;
      for (const auto& ext : sparsify_candidates(in, rho, delta, p.est, p.c0, so))
        if (testing::is_sparse_witness(in, ext, best.optimum)) {
          ok = true;
          break;
        }
      if (ok) break;
    }
    if (ok) ++found;
    else if (first_failure.empty()) first_failure = "seed " + std::to_string(seed);
  }
  o.pass = found == 20;
  o.detail = std::to_string(found) + "/20 planted instances have a sparse witness" +
             (zero ? " (" + std::to_string(zero) + " with zero optimum)" : "") +
             (first_failure.empty() ? "" : "; first miss " + first_failure);
  return o;
}

double bernoulli_expected_max(std::vector<std::pair<double, double>> sp) {
  std::sort(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double none_yet = 1.0, total = 0.0;
  for (const auto& [s, p] : sp) {
    total += s * p * none_yet;
    none_yet *= 1.0 - p;
  }
  return total;
}

Outcome stochastic_center() {
  Outcome o;
  std::ostringstream d;
  int failures = 0, lemma52 = 0;
  double worst_m = 0.0, worst_k = 0.0, guarantee_m = 0.0, guarantee_k = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    for (ConstraintKind kind : {ConstraintKind::kMatroid, ConstraintKind::kKnapsack}) {
      StochasticParams p;
      p.base.seed = seed;
      p.base.kind = kind;
      p.base.num_facilities = 4 + seed % 3;
      p.base.num_clients = 4 + seed % 3;
      p.base.k = 1 + seed % 2;
      p.num_points = 2 + seed % 5;
      p.support = 1 + seed % 3;
      const StochasticInstance s = generate_stochastic(p);
      StochasticOptions opt;
      opt.knapsack.rho = 0.5;
      opt.knapsack.epsilon = 0.25;
      opt.knapsack.jobs = 4;
      const StochasticReport r = solve_stochastic_center(s, opt);
      const double star = brute_stochastic_opt(s).value;
      const double value = expected_max_exact(s, r.solution_positions);
      if (!(value <= r.guarantee * star + 1e-6) || !r.all_hold() || !is_feasible(s.base, r.solution_positions))
        ++failures;
      const double ratio = star > 0 ? value / star : 0.0;
      if (kind == ConstraintKind::kMatroid) {
        worst_m = std::max(worst_m, ratio);
        guarantee_m = r.guarantee;
      } else {
        worst_k = std::max(worst_k, ratio);
        guarantee_k = r.guarantee;
      }
      if (brute_opt(threshold_instance(s, 0.0)).value < star - 1e-9) ++lemma52;
    }
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int lemma51 = 0, premise = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double t = 1.0 + 9.0 * unit(rng);
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<double, double>> sp;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sp.emplace_back(t * (1.0 + 4.0 * unit(rng)), 0.3 * unit(rng) * unit(rng));
      sum += sp.back().first * sp.back().second;
    }
    if (bernoulli_expected_max(sp) >= t / 3) continue;
    ++premise;
    if (!(sum < t)) ++lemma51;
  }
  o.pass = failures == 0 && lemma51 == 0 && lemma52 == 0;
  d << "40 runs, " << failures << " failures; matroid worst ratio " << fmt("%.3f", worst_m) << " vs "
    << fmt("%.3f", guarantee_m) << ", knapsack worst " << fmt("%.3f", worst_k) << " vs " << fmt("%.3f", guarantee_k)
    << "; Bernoulli property violated " << lemma51 << "/" << premise << "; OPT0 < OPT* on " << lemma52;
  o.detail = d.str();
  return o;
}

Outcome lp_vertex_contract() {
  Outcome o;
  std::mt19937_64 rng(8080);
  std::uniform_int_distribution<int> nvars(1, 6), nrows(0, 8), coef(-4, 4), rel(0, 2);
  int failures = 0, feasible = 0;
  for (int trial = 0; trial < 50; ++trial) {
    LinearProgram lp;
    const int n = nvars(rng);
    std::vector<double> point;
    for (int v = 0; v < n; ++v) {
      const double hi = 2.0 + (coef(rng) + 4) % 3;
      lp.add_variable(0.0, hi, coef(rng));
      point.push_back(hi * static_cast<double>(rng() % 5) / 4.0);
    }
    // Most rows keep a planted point feasible; every fifth LP is left to chance.
    const bool planted = trial % 5 != 0;
    const int m = nrows(rng);
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<int, double>> terms;
      double at = 0.0;
      for (int v = 0; v < n; ++v)
        if (const int c = coef(rng); c != 0) {
          terms.emplace_back(v, c);
          at += c * point[v];
        }
      const auto relation = static_cast<Relation>(rel(rng));
      double rhs = coef(rng) + 3;
      if (planted) rhs = relation == Relation::kLessEqual ? at + rng() % 3 : relation == Relation::kGreaterEqual ? at - rng() % 3 : at;
      lp.add_constraint(terms, relation, rhs);
    }
    const LpResult r = solve(lp);
    const auto ref = testing::vertex_enumeration_optimum(lp);
    if (r.optimal() != ref.has_value()) {
      ++failures;
      continue;
    }
    if (!ref) continue;
    ++feasible;
    if (std::abs(r.solution.objective_value - *ref) > 1e-6 || !audit_vertex(lp, r.solution).is_vertex) ++failures;
  }
  o.pass = failures == 0;
  o.detail = "50 LPs (" + std::to_string(feasible) + " feasible), " + std::to_string(failures) + " mismatches";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"kmeddis guarantee", kmeddis_guarantee},
      {"discretization bound", discretization_bound},
      {"rounding invariants", rounding_invariants},
      {"matmeddis guarantee", matmeddis_guarantee},
      {"knapmeddis pipeline", knapmeddis_pipeline},
      {"sparsification existence", sparsification_existence},
      {"stochastic center", stochastic_center},
      {"lp vertex contract", lp_vertex_contract},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
