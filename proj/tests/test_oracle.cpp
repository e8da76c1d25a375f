#include <gtest/gtest.h>

#include "meddis/oracle.hpp"
#include "oracles.hpp"

using namespace meddis;
using meddis::testing::line_instance;
using meddis::testing::naive_cost;

namespace {

Instance random_instance(std::uint64_t seed) {
  GenerateParams g;
  g.seed = seed;
  g.kind = static_cast<ConstraintKind>(seed % 3);
  g.matroid_type = seed % 2 ? "partition" : "explicit";
  g.num_facilities = 3 + seed % 5;
  g.num_clients = 2 + seed % 7;
  g.k = 1 + seed % 3;
  return generate(g);
}

// Appends a copy of facility f at the same location.
Instance with_duplicate(const Instance& in, int f) {
  Instance out = in;
  const std::size_t n = in.metric.size();
  const int site = in.facilities[f];
  out.metric.ids.push_back(in.metric.ids[site] + "_copy");
  out.metric.dist.assign((n + 1) * (n + 1), 0.0);
  for (std::size_t p = 0; p <= n; ++p)
    for (std::size_t q = 0; q <= n; ++q) {
      const std::size_t pp = p == n ? site : p;
      const std::size_t qq = q == n ? site : q;
      out.metric.at(p, q) = in.metric(pp, qq);
    }
  out.facilities.push_back(static_cast<int>(n));
  out.facility_weights.push_back(in.facility_weights[f]);
  return out;
}

}  // namespace

TEST(BruteOpt, UnconstrainedAssignsNearest) {
  const Instance in = line_instance({0, 10}, {1, 9, 6}, {0, 0, 0}, Cardinality{2});
  const auto r = brute_opt(in);
  EXPECT_EQ(r.optimum, (FacilitySet{0, 1}));
  EXPECT_DOUBLE_EQ(r.value, 1 + 1 + 4);
}

TEST(BruteOpt, ForcedSingleton) {
  Instance in = line_instance({0, 10}, {9}, {0}, Knapsack{1});
  in.facility_weights = {1, 2};
  const auto r = brute_opt(in);
  EXPECT_EQ(r.optimum, (FacilitySet{0}));
  EXPECT_EQ(r.enumerated, 1u);
  EXPECT_DOUBLE_EQ(r.value, 9);
}

TEST(BruteOpt, AgreesWithRecursiveEnumeration) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance in = random_instance(seed);
    std::vector<int> set;
    const double ref = meddis::testing::recursive_opt(in, &set);
    const auto r = brute_opt(in);
    EXPECT_NEAR(r.value, ref, 1e-9) << "seed " << seed;
    EXPECT_NEAR(naive_cost(in, r.optimum), r.value, 1e-9);
    EXPECT_TRUE(is_feasible(in, r.optimum));
  }
}

TEST(BruteOpt, ShardedRunsAgree) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = random_instance(seed);
    const auto a = brute_opt(in, kOracleGuard, 1);
    const auto b = brute_opt(in, kOracleGuard, 3);
    EXPECT_EQ(a.optimum, b.optimum);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.enumerated, b.enumerated);
  }
}

TEST(BruteOpt, GuardIsCheckedBeforeEnumerating) {
  const Instance in = random_instance(4);
  EXPECT_THROW(brute_opt(in, 2.0), GuardExceeded);
}

TEST(BruteOpt, InvariantUnderFacilityDuplication) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance in = random_instance(seed);
    if (constraint_kind(in) == ConstraintKind::kMatroid) continue;
    const Instance dup = with_duplicate(in, static_cast<int>(seed % in.num_facilities()));
    EXPECT_NEAR(brute_opt(dup).value, brute_opt(in).value, 1e-9) << "seed " << seed;
  }
}

TEST(BruteOpt, ZeroDiscountsGiveTheMedianOptimum) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenerateParams g;
    g.seed = seed;
    g.discount_scale = 0.0;
    g.num_facilities = 3 + seed % 4;
    g.num_clients = 2 + seed % 6;
    g.k = 1 + seed % 3;
    const Instance in = generate(g);
    EXPECT_NEAR(brute_opt(in).value, meddis::testing::median_opt(in, g.k), 1e-9);
  }
}

TEST(CheckBicriteria, OptimumAgainstItselfIsTight) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance in = random_instance(seed);
    const auto best = brute_opt(in);
    const auto c = check_bicriteria(in, best.optimum, 1.0, 1.0);
    EXPECT_TRUE(c.holds);
    EXPECT_DOUBLE_EQ(c.lhs, c.rhs);
  }
}

TEST(CheckBicriteria, ZeroOptimumNeedsAVanishingLhs) {
  const Instance in = line_instance({0, 5}, {0, 5}, {0, 0}, Cardinality{2});
  EXPECT_EQ(brute_opt(in).value, 0.0);
  EXPECT_TRUE(check_bicriteria(in, std::vector<int>{0, 1}, 3.0, 100.0).holds);
  EXPECT_FALSE(check_bicriteria(in, std::vector<int>{0}, 3.0, 100.0).holds);
}

TEST(CheckBicriteria, JsonShape) {
  const Instance in = line_instance({0, 5}, {1}, {0}, Cardinality{1});
  const auto j = to_json(check_bicriteria(in, std::vector<int>{1}, 2.0, 3.0), in);
  for (const char* key : {"opt", "optSet", "lhs", "rhs", "holds", "alpha", "beta"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["optSet"], nlohmann::json::array({"f0"}));
  EXPECT_DOUBLE_EQ(j["lhs"].get<double>(), 4.0);
  EXPECT_DOUBLE_EQ(j["rhs"].get<double>(), 3.0);
  EXPECT_FALSE(j["holds"].get<bool>());
}

TEST(BruteStochastic, DeterministicPointsReduceToACenterProblem) {
  StochasticInstance s;
  s.base = line_instance({0, 6, 12}, {1, 5, 11}, {0, 0, 0}, Cardinality{1});
  s.points = {{"a", {{0, 1.0}}}, {"b", {{2, 1.0}}}};
  const auto r = brute_stochastic_opt(s);
  // Center over the realized clients at 1 and 11.
  EXPECT_EQ(r.optimum, (FacilitySet{1}));
  EXPECT_DOUBLE_EQ(r.value, 5.0);
}

TEST(BruteStochastic, ZeroProbabilitiesCostNothing) {
  StochasticInstance s;
  s.base = line_instance({0, 6}, {1, 5}, {0, 0}, Cardinality{1});
  s.points = {{"a", {{0, 0.0}}}};
  EXPECT_EQ(brute_stochastic_opt(s).value, 0.0);
}

TEST(BruteStochastic, TopSetsMatchMonteCarloRanking) {
  StochasticParams p;
  p.base.seed = 13;
  p.base.num_facilities = 5;
  p.base.num_clients = 5;
  p.base.k = 1;
  p.num_points = 4;
  const auto s = generate_stochastic(p);
  std::vector<std::pair<double, int>> exact;
  for (int f = 0; f < 5; ++f) exact.emplace_back(expected_max_exact(s, std::vector<int>{f}), f);
  std::sort(exact.begin(), exact.end());
  EXPECT_EQ(brute_stochastic_opt(s).optimum, (FacilitySet{exact[0].second}));
  // Monte Carlo agrees on the top three whenever their gaps exceed the sampling error.
  std::vector<MonteCarloEstimate> mc;
  for (int r = 0; r < 3; ++r) mc.push_back(expected_max_montecarlo(s, std::vector<int>{exact[r].second}, 100000, 5));
  for (int r = 0; r + 1 < 3; ++r)
    if (exact[r + 1].first - exact[r].first > 6 * (mc[r].std_error + mc[r + 1].std_error))
      EXPECT_LT(mc[r].mean, mc[r + 1].mean);
}
