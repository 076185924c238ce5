#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "posauc/mechanisms.hpp"
#include "posauc/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace posauc;

namespace {

MechanismSpec mech(const std::string& name, int k) { return parse_mechanism(name, k); }

Setting sampled(const std::string& family, std::uint64_t seed, int n, int m, int k) {
  auto spec = parse_family(family);
  spec.seed = seed;
  return normalize_setting(sample_setting(spec, n, m), k);
}

}  // namespace

TEST(Simulate, GfpWorkedExample) {
  const auto o = simulate_outcome(fixture::eos_pair(), mech("GFP", 10), {4, 2});
  EXPECT_DOUBLE_EQ(o.expected_utility[0], 3.0);
  EXPECT_DOUBLE_EQ(o.expected_utility[1], 0.5);
  EXPECT_DOUBLE_EQ(o.revenue, 2.5);
  EXPECT_DOUBLE_EQ(o.expected_clicks, 0.75);
}

TEST(Simulate, WeightedGspWorkedExample) {
  const auto o = simulate_outcome(fixture::v_pair(), mech("wGSP", 5), {2, 3});
  EXPECT_DOUBLE_EQ(o.expected_utility[0], 2.4);
  EXPECT_DOUBLE_EQ(o.expected_utility[1], 0.8);
  EXPECT_DOUBLE_EQ(o.revenue, 1.6);
  EXPECT_DOUBLE_EQ(o.expected_clicks, 1.0);
  EXPECT_DOUBLE_EQ(o.welfare, 4.8);
}

TEST(Simulate, CascadeWorkedExample) {
  const auto o = simulate_outcome(fixture::cascade_pair(), mech("uGSP", 10), {3, 1});
  EXPECT_DOUBLE_EQ(o.expected_utility[0], 9.0);
  EXPECT_DOUBLE_EQ(o.expected_utility[1], 2.0);
  EXPECT_DOUBLE_EQ(o.revenue, 1.0);
  EXPECT_DOUBLE_EQ(o.expected_clicks, 1.5);
}

TEST(Simulate, AllZeroBids) {
  for (const auto& name : {"GFP", "uGSP", "wGSP"}) {
    const auto o = simulate_outcome(fixture::v_pair(), mech(name, 5), {0, 0});
    EXPECT_EQ(o.revenue, 0.0);
    EXPECT_EQ(o.expected_clicks, 0.0);
    EXPECT_EQ(o.welfare, 0.0);
  }
}

TEST(Simulate, TiesShareSlotsUniformly) {
  const auto o = simulate_outcome(fixture::eos_pair(), mech("uGSP", 10), {3, 3});
  ASSERT_EQ(o.allocation.size(), 2u);
  for (const auto& [slots, p] : o.allocation) EXPECT_DOUBLE_EQ(p, 0.5);
  // Top of a tie pays the tied bid; bottom pays nothing.
  EXPECT_DOUBLE_EQ(o.expected_utility[0], 0.5 * 0.5 * 7 + 0.5 * 0.25 * 10);
}

TEST(Simulate, LexicographicTieFavorsLowerIndex) {
  const auto o = simulate_outcome(fixture::eos_pair(), mech("uGSP+lex", 10), {3, 3});
  ASSERT_EQ(o.allocation.size(), 1u);
  EXPECT_EQ(o.allocation[0].first, (std::vector<int>{0, 1}));
}

TEST(Simulate, SlotLimitLeavesBottomUnallocated) {
  auto s = fixture::eos_pair();
  s.m = 1;
  s.clicks = {{0.5, 0.0}, {0.5, 0.0}};
  const auto o = simulate_outcome(s, mech("uGSP", 10), {4, 2});
  EXPECT_DOUBLE_EQ(o.expected_utility[0], 0.5 * (10 - 2));
  EXPECT_DOUBLE_EQ(o.expected_utility[1], 0.0);
}

TEST(Simulate, RejectsOutOfRangeBids) {
  EXPECT_THROW(simulate_outcome(fixture::eos_pair(), mech("GFP", 5), {6, 0}), std::invalid_argument);
  EXPECT_THROW(simulate_outcome(fixture::eos_pair(), mech("GFP", 5), {1}), std::invalid_argument);
}

TEST(Welfare, CascadeTieBetweenOrders) {
  const Setting g = fixture::cascade_pair();
  EXPECT_DOUBLE_EQ(max_welfare(g).welfare, 12.0);
  EXPECT_DOUBLE_EQ(oracle::brute_max_welfare(g), 12.0);
}

TEST(Welfare, MatchesBruteForce) {
  for (const auto& family : all_families())
    for (std::uint64_t seed = 0; seed < 8; ++seed)
      for (int m : {1, 3, 4}) {
        const auto s = sampled(family, seed, 4, m, 20);
        EXPECT_NEAR(max_welfare(s).welfare, oracle::brute_max_welfare(s), 1e-9) << family << " m=" << m;
        EXPECT_NEAR(max_clicks(s), oracle::brute_max_clicks(s), 1e-12) << family;
      }
}

TEST(Welfare, ClicksSortByQualityInV) {
  const auto s = std::get<AuctionSetting>(sampled("V-UNI", 3, 4, 4, 10));
  std::vector<int> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s.qualities[a] > s.qualities[b]; });
  double total = 0.0;
  for (int r = 0; r < 4; ++r) total += s.clicks[order[r]][r];
  EXPECT_NEAR(max_clicks(s), total, 1e-12);
}

TEST(Welfare, SingleAgent) {
  AuctionSetting s;
  s.n = 1;
  s.m = 1;
  s.model_kind = ModelKind::EOS;
  s.clicks = {{0.3}};
  s.values = {{2.0}};
  s.qualities = {0.3};
  EXPECT_DOUBLE_EQ(max_clicks(s), 0.3);
  const auto v = vcg(s);
  EXPECT_EQ(v.total_payment[0], 0.0);
}

TEST(Hungarian, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    std::vector<std::vector<double>> p(n, std::vector<double>(n));
    for (auto& row : p)
      for (auto& x : row) x = u(rng);
    const auto col = hungarian_max(p);
    double got = 0.0;
    for (int i = 0; i < n; ++i) got += p[i][col[i]];
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double t = 0.0;
      for (int i = 0; i < n; ++i) t += p[i][perm[i]];
      best = std::max(best, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-12);
  }
}

TEST(Vcg, ClarkePivotExample) {
  const auto v = vcg(fixture::eos_pair());
  EXPECT_EQ(v.allocation.slot_of, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(v.total_payment[0], 1.0);
  EXPECT_DOUBLE_EQ(v.total_payment[1], 0.0);
  EXPECT_DOUBLE_EQ(v.outcome.expected_utility[0], 4.0);
}

TEST(Vcg, EfficientAndIndividuallyRational) {
  for (const auto& family : all_families())
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = sampled(family, seed, 4, 3, 10);
      const auto v = vcg(s);
      EXPECT_EQ(metric_vector(v.outcome, s).efficiency, 1.0) << family;
      for (double u : v.outcome.expected_utility) EXPECT_GE(u, -1e-9) << family;
      for (double p : v.total_payment) EXPECT_GE(p, -1e-9) << family;
    }
}

TEST(Vcg, DiscreteReportsAreGridValues) {
  EXPECT_EQ(grid_round(2.5, 10), 3.0);
  EXPECT_EQ(grid_round(2.4999, 10), 2.0);
  EXPECT_EQ(grid_round(12.0, 10), 10.0);
  const auto d = vcg(fixture::v_pair(), 5);
  EXPECT_GT(d.outcome.welfare, 0.0);
}

TEST(Simulate, EosRelevanceSameForFullAllocations) {
  const auto s = sampled("EOS-UNI", 2, 4, 4, 10);
  const auto a = simulate_outcome(s, mech("uGSP", 10), {1, 2, 3, 4});
  const auto b = simulate_outcome(s, mech("uGSP", 10), {4, 3, 2, 1});
  EXPECT_NEAR(a.expected_clicks, b.expected_clicks, 1e-12);
}
