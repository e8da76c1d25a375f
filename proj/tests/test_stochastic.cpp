#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "meddis/io.hpp"
#include "meddis/oracle.hpp"
#include "meddis/stochastic.hpp"
#include "oracles.hpp"

using namespace meddis;
using meddis::testing::line_instance;

namespace {

StochasticInstance line_stochastic(std::vector<double> facility_x, std::vector<double> client_x,
                                   std::vector<StochasticPoint> points, ConstraintFamily constraint = Cardinality{1}) {
  StochasticInstance s;
  s.base = line_instance(facility_x, client_x, std::vector<double>(client_x.size(), 0.0), std::move(constraint));
  s.points = std::move(points);
  return s;
}

StochasticInstance random_stochastic(std::uint64_t seed, ConstraintKind kind) {
  StochasticParams p;
  p.base.seed = seed;
  p.base.kind = kind;
  p.base.num_facilities = 4 + seed % 2;
  p.base.num_clients = 4 + seed % 3;
  p.base.k = 1 + seed % 2;
  p.num_points = 3 + seed % 4;
  p.support = 1 + seed % 3;
  return generate_stochastic(p);
}

// E[max_i s_i X_i] for independent Bernoulli X_i, by sorting s downwards.
double bernoulli_expected_max(std::vector<std::pair<double, double>> sp) {
  std::sort(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double none_yet = 1.0, total = 0.0;
  for (const auto& [s, p] : sp) {
    total += s * p * none_yet;
    none_yet *= 1.0 - p;
  }
  return total;
}

}  // namespace

TEST(RealizationProbs, CertainPoint) {
  const auto s = line_stochastic({0}, {1, 2}, {{"v", {{0, 1.0}}}});
  const auto p = realization_probs(s);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(RealizationProbs, TwoCoinFlips) {
  const auto s = line_stochastic({0}, {1}, {{"u", {{0, 0.5}}}, {"v", {{0, 0.5}}}});
  EXPECT_DOUBLE_EQ(realization_probs(s)[0], 0.75);
}

TEST(RealizationProbs, MatchEnumeration) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto s = random_stochastic(seed, ConstraintKind::kCardinality);
    const auto p = realization_probs(s);
    const auto q = meddis::testing::enumerated_probs(s);
    for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(p[j], q[j], 1e-12) << "seed " << seed;
  }
}

TEST(ExpectedMax, DeterministicPoint) {
  const auto s = line_stochastic({0}, {4}, {{"v", {{0, 1.0}}}});
  EXPECT_DOUBLE_EQ(expected_max_exact(s, std::vector<int>{0}), 4.0);
}

TEST(ExpectedMax, NothingRealizes) {
  const auto s = line_stochastic({0}, {4, 9}, {{"v", {{0, 0.0}}}, {"u", {{1, 0.0}}}});
  EXPECT_EQ(expected_max_exact(s, std::vector<int>{0}), 0.0);
}

TEST(ExpectedMax, DeterministicPointsGiveTheFarthestClient) {
  const auto s = line_stochastic({0, 10}, {1, 3, 8}, {{"a", {{0, 1.0}}}, {"b", {{1, 1.0}}}, {"c", {{2, 0.0}}}});
  EXPECT_DOUBLE_EQ(expected_max_exact(s, std::vector<int>{0}), 3.0);
  EXPECT_DOUBLE_EQ(expected_max_exact(s, std::vector<int>{1}), 9.0);
}

TEST(ExpectedMax, GuardRefusesLargeOutcomeSpaces) {
  const auto s = random_stochastic(5, ConstraintKind::kCardinality);
  EXPECT_THROW(expected_max_exact(s, std::vector<int>{0}, 1.0), GuardExceeded);
}

TEST(ExpectedMax, MonteCarloWithinThreeSigma) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = random_stochastic(seed, ConstraintKind::kCardinality);
    const std::vector<int> set{0};
    const double exact = expected_max_exact(s, set);
    const auto mc = expected_max_montecarlo(s, set, 100000, seed);
    EXPECT_LE(std::abs(mc.mean - exact), 3 * mc.std_error + 1e-12) << "seed " << seed;
    const auto again = expected_max_montecarlo(s, set, 100000, seed);
    EXPECT_EQ(mc.mean, again.mean);
  }
}

TEST(ExpectedMax, ThresholdChainHolds) {
  // E[max] <= a T + sum_j p_j (c_jS - a T)^+ for every S, T and a.
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_stochastic(seed, ConstraintKind::kCardinality);
    const auto p = realization_probs(s);
    for (int f = 0; f < s.base.num_facilities(); ++f) {
      const std::vector<int> set{f};
      const double e = expected_max_exact(s, set);
      for (int t = 0; t < 5; ++t) {
        const double level = s.base.max_distance() * static_cast<double>(rng() % 1000) / 1000.0;
        double rhs = level;
        for (int j = 0; j < s.base.num_clients(); ++j) rhs += p[j] * positive_part(s.base.fc(f, j) - level);
        EXPECT_LE(e, rhs + 1e-9);
      }
    }
  }
}

TEST(BernoulliMax, SmallExpectedMaxImpliesSmallSum) {
  // Whenever all s_i >= T and E[max s_i X_i] < T / 3, the sum s_i p_i stays below T.
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int premise = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double t = 1.0 + 9.0 * unit(rng);
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<double, double>> sp;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = t * (1.0 + 4.0 * unit(rng));
      const double p = 0.3 * unit(rng) * unit(rng);
      sp.emplace_back(s, p);
      sum += s * p;
    }
    if (bernoulli_expected_max(sp) >= t / 3) continue;
    ++premise;
    EXPECT_LT(sum, t) << "trial " << trial;
  }
  EXPECT_GT(premise, 1000);
}

TEST(ThresholdInstance, ZeroThresholdOptimumDominatesTheStochasticOptimum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = random_stochastic(seed, static_cast<ConstraintKind>(seed % 3));
    const double opt0 = brute_opt(threshold_instance(s, 0.0)).value;
    const double opt_star = brute_stochastic_opt(s).value;
    EXPECT_GE(opt0, opt_star - 1e-9) << "seed " << seed;
  }
}

TEST(ThresholdInstance, WeightsAreHitProbabilities) {
  const auto s = random_stochastic(2, ConstraintKind::kCardinality);
  const Instance t = threshold_instance(s, 2.5);
  const auto p = realization_probs(s);
  for (int j = 0; j < t.num_clients(); ++j) {
    EXPECT_EQ(t.discounts[j], 2.5);
    EXPECT_DOUBLE_EQ(t.client_weights[j], p[j]);
  }
}

TEST(Generate, DeterministicAndValid) {
  const auto a = random_stochastic(7, ConstraintKind::kMatroid);
  const auto b = random_stochastic(7, ConstraintKind::kMatroid);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_TRUE(validate(a).empty());
  const auto back = stochastic_from_json(to_json(a));
  EXPECT_EQ(to_json(back).dump(), to_json(a).dump());
}

TEST(SolveStochastic, MatroidAndKnapsackGuarantees) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed)
    for (ConstraintKind kind : {ConstraintKind::kCardinality, ConstraintKind::kMatroid, ConstraintKind::kKnapsack}) {
      const auto s = random_stochastic(seed, kind);
      StochasticOptions opt;
      opt.knapsack.rho = 0.5;
      opt.knapsack.epsilon = 0.25;
      const StochasticReport r = solve_stochastic_center(s, opt);
      EXPECT_TRUE(r.all_hold()) << "seed " << seed;
      EXPECT_TRUE(is_feasible(s.base, r.solution_positions));
      EXPECT_NEAR(r.expected_max, expected_max_exact(s, r.solution_positions), 1e-9);
      EXPECT_LE(r.expected_max, r.guarantee * brute_stochastic_opt(s).value + 1e-6) << "seed " << seed;
      for (std::size_t k = 1; k < r.sweep.size(); ++k) EXPECT_LT(r.sweep[k].threshold, r.sweep[k - 1].threshold);
    }
}

TEST(SolveStochastic, MatroidGuaranteeConstant) {
  const auto s = random_stochastic(3, ConstraintKind::kMatroid);
  StochasticOptions opt;
  opt.epsilon = 0.01;
  const StochasticReport r = solve_stochastic_center(s, opt);
  EXPECT_NEAR(r.alpha + r.beta, 17.213, 1e-3);
  EXPECT_NEAR(r.guarantee, 3 * 1.02 * (r.alpha + r.beta), 1e-9);
  EXPECT_LT(3 * (r.alpha + r.beta), 51.64);
}
