#include <gtest/gtest.h>

#include <random>

#include "posauc/agg.hpp"

using namespace posauc;

TEST(Agg, ConstantGame) {
  ActionGraphGame g;
  const int a = g.add_action_node(0, "only");
  g.finalize();
  g.set_payoff(a, 0, 3.5);
  EXPECT_EQ(evaluate_profile(g, {0}), std::vector<double>{3.5});
}

TEST(Agg, SumNodeCountsTokens) {
  ActionGraphGame g;
  const int a0 = g.add_action_node(0);
  const int a1 = g.add_action_node(1);
  const int sum = g.add_function_node(NodeKind::Sum, "count");
  g.add_arc(a0, sum);
  g.add_arc(a1, sum);
  g.add_arc(sum, a0);
  g.add_arc(sum, a1);
  g.finalize();
  for (int c = 0; c <= 2; ++c) {
    g.set_payoff(a0, static_cast<std::uint64_t>(c), 10.0 * c);
    g.set_payoff(a1, static_cast<std::uint64_t>(c), -1.0 * c);
  }
  EXPECT_EQ(configuration(g, {0, 0})[sum], 2);
  EXPECT_EQ(evaluate_profile(g, {0, 0}), (std::vector<double>{20.0, -2.0}));
}

TEST(Agg, OrAndArgmaxNodes) {
  // Three agents, two actions each ("low", "high"). An Or node tells whether
  // anyone chose high; an argmax picks the heaviest occupied low-action source.
  ActionGraphGame g;
  std::vector<int> low, high;
  for (int i = 0; i < 3; ++i) {
    low.push_back(g.add_action_node(i, "low"));
    high.push_back(g.add_action_node(i, "high"));
  }
  const int any_high = g.add_function_node(NodeKind::Or);
  const int arg = g.add_function_node(NodeKind::WeightedArgmax);
  for (int i = 0; i < 3; ++i) {
    g.add_arc(high[i], any_high);
    g.add_arc(low[i], arg, 1.0 + i);
  }
  for (int i = 0; i < 3; ++i) {
    g.add_arc(any_high, low[i]);
    g.add_arc(arg, low[i]);
    g.add_arc(any_high, high[i]);
  }
  g.finalize();
  EXPECT_EQ(g.max_value(any_high), 1);
  EXPECT_EQ(g.max_value(arg), 3);
  for (int i = 0; i < 3; ++i) {
    for (int o = 0; o <= 1; ++o) {
      for (int w = 0; w <= 3; ++w) {
        const int vals[] = {o, w};
        g.set_payoff(low[i], g.pack(low[i], vals), 100.0 * o + w);
      }
      const int hv[] = {o};
      g.set_payoff(high[i], g.pack(high[i], hv), 7.0 * o);
    }
  }
  const auto cfg = configuration(g, {0, 1, 0});
  EXPECT_EQ(cfg[any_high], 1);
  EXPECT_EQ(cfg[arg], 3);  // agent 2's low action has weight 3
  EXPECT_EQ(evaluate_profile(g, {0, 1, 0}), (std::vector<double>{103.0, 7.0, 103.0}));
  EXPECT_EQ(configuration(g, {1, 1, 1})[arg], 0);
}

TEST(Agg, RejectsCycles) {
  ActionGraphGame g;
  const int a = g.add_action_node(0);
  const int s1 = g.add_function_node(NodeKind::Sum);
  const int s2 = g.add_function_node(NodeKind::Sum);
  g.add_arc(a, s1);
  g.add_arc(s2, s1);
  g.add_arc(s1, s2);
  EXPECT_THROW(g.finalize(), GameStructureError);
}

TEST(Agg, MissingEntryIsReported) {
  ActionGraphGame g;
  const int a = g.add_action_node(0);
  g.finalize();
  EXPECT_THROW(evaluate_profile(g, {0}), MissingTableEntry);
}

TEST(Agg, EmptyGameStats) {
  ActionGraphGame g;
  g.finalize();
  EXPECT_EQ(size_stats(g), (SizeStats{0, 0, 0}));
}

namespace {

// Random game with one shared Sum node and per-action tables over its count.
struct RandomGame {
  ActionGraphGame g;
  std::vector<std::vector<double>> table;  // [action node][count]
};

RandomGame random_game(std::uint64_t seed, int agents, int actions) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  RandomGame r;
  std::vector<int> nodes;
  for (int i = 0; i < agents; ++i)
    for (int a = 0; a < actions; ++a) nodes.push_back(r.g.add_action_node(i));
  // Sum over the even-indexed actions of every agent.
  const int sum = r.g.add_function_node(NodeKind::Sum);
  for (int i = 0; i < agents; ++i)
    for (int a = 0; a < actions; a += 2) r.g.add_arc(nodes[i * actions + a], sum);
  for (int v : nodes) r.g.add_arc(sum, v);
  r.g.finalize();
  r.table.assign(nodes.size(), {});
  for (std::size_t t = 0; t < nodes.size(); ++t)
    for (int c = 0; c <= agents; ++c) {
      r.table[t].push_back(u(rng));
      r.g.set_payoff(nodes[t], static_cast<std::uint64_t>(c), r.table[t].back());
    }
  return r;
}

}  // namespace

TEST(BestResponse, MatchesDirectRecomputation) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto r = random_game(seed, 3, 4);
    std::mt19937_64 rng(seed + 100);
    std::uniform_int_distribution<int> pick(0, 3);
    const Profile p{pick(rng), pick(rng), pick(rng)};
    for (int agent = 0; agent < 3; ++agent) {
      // Direct: count even-indexed actions among the profile with the agent replaced.
      std::vector<double> direct(4);
      for (int a = 0; a < 4; ++a) {
        int count = 0;
        for (int j = 0; j < 3; ++j) count += ((j == agent ? a : p[j]) % 2 == 0);
        direct[a] = r.table[agent * 4 + a][count];
      }
      const double best = *std::max_element(direct.begin(), direct.end());
      const auto br = deviation_best_response(r.g, p, agent);
      EXPECT_DOUBLE_EQ(br.best, best);
      EXPECT_DOUBLE_EQ(br.current, direct[p[agent]]);
      for (int a : br.actions) EXPECT_DOUBLE_EQ(direct[a], best);
    }
  }
}

TEST(BestResponse, DominantActionAlwaysChosen) {
  ActionGraphGame g;
  const int a = g.add_action_node(0), b = g.add_action_node(0);
  const int c = g.add_action_node(1), d = g.add_action_node(1);
  const int sum = g.add_function_node(NodeKind::Sum);
  g.add_arc(c, sum);
  g.add_arc(sum, a);
  g.add_arc(sum, b);
  g.finalize();
  for (int k = 0; k <= 1; ++k) {
    g.set_payoff(a, k, 1.0 + k);
    g.set_payoff(b, k, 5.0 + k);
  }
  g.set_payoff(c, 0, 0.0);
  g.set_payoff(d, 0, 0.0);
  for (int other = 0; other < 2; ++other) {
    const auto br = deviation_best_response(g, {0, other}, 0);
    EXPECT_EQ(br.actions, std::vector<int>{1});
  }
  const auto br = deviation_best_response(g, {1, 0}, 0);
  EXPECT_EQ(br.best, br.current);
}

TEST(Agg, DumpListsEveryNode) {
  auto r = random_game(1, 2, 2);
  const auto text = dump(r.g);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), r.g.node_count());
}
