#pragma once

// Direct outcome simulation of position auctions, welfare and click
// optimizers, and VCG benchmarks. Nothing here goes through the action graph.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "posauc/mechanism_spec.hpp"
#include "posauc/model.hpp"

namespace posauc {

// One component of an agent's allocation lottery.
struct Placement {
  int position = -1;       // slot (0-based), -1 when unallocated
  double probability = 0.0;
  double clicks = 0.0;     // click probability in this component
  double value = 0.0;      // value per click in this component
  double price = 0.0;      // per-click price
};

struct Outcome {
  // Joint lottery over assignments (slot per agent, -1 unallocated). Empty when
  // the tie lottery is not a joint distribution or too large to list.
  std::vector<std::pair<std::vector<int>, double>> allocation;
  bool joint_lottery = true;
  std::vector<std::vector<Placement>> placements;  // per agent
  std::vector<double> expected_utility;
  std::vector<double> payment;                     // expected total payment per agent
  std::vector<double> agent_clicks;
  double revenue = 0.0;
  double expected_clicks = 0.0;
  double welfare = 0.0;  // on true values
};

constexpr std::size_t kJointLotteryCap = 40320;

namespace detail {

inline void finish_outcome(Outcome& o) {
  const std::size_t n = o.placements.size();
  o.expected_utility.assign(n, 0.0);
  o.payment.assign(n, 0.0);
  o.agent_clicks.assign(n, 0.0);
  o.revenue = o.expected_clicks = o.welfare = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : o.placements[i]) {
      o.expected_utility[i] += p.probability * p.clicks * (p.value - p.price);
      o.payment[i] += p.probability * p.clicks * p.price;
      o.agent_clicks[i] += p.probability * p.clicks;
      o.welfare += p.probability * p.clicks * p.value;
    }
    o.revenue += o.payment[i];
    o.expected_clicks += o.agent_clicks[i];
  }
}

inline void add_placement(std::vector<Placement>& list, const Placement& p) {
  for (auto& q : list)
    if (q.position == p.position && q.clicks == p.clicks && q.value == p.value && q.price == p.price) {
      q.probability += p.probability;
      return;
    }
  list.push_back(p);
}

// Participants grouped into blocks of equal effective bid, highest first,
// each block in ascending agent order.
inline std::vector<std::vector<int>> ranked_blocks(const std::vector<int>& bids, const std::vector<double>& w) {
  std::vector<int> part;
  for (int i = 0; i < static_cast<int>(bids.size()); ++i)
    if (bids[i] > 0) part.push_back(i);
  std::stable_sort(part.begin(), part.end(),
                   [&](int a, int b) { return effective_bid(bids[a], w[a]) > effective_bid(bids[b], w[b]); });
  std::vector<std::vector<int>> blocks;
  for (int a : part) {
    if (blocks.empty() || effective_bid(bids[blocks.back().front()], w[blocks.back().front()]) != effective_bid(bids[a], w[a]))
      blocks.emplace_back();
    blocks.back().push_back(a);
  }
  return blocks;
}

inline double factorial(int x) {
  double f = 1.0;
  for (int t = 2; t <= x; ++t) f *= t;
  return f;
}

// Per-click price of the agent at rank r of a realized order.
inline double order_price(const std::vector<int>& order, int r, const std::vector<int>& bids,
                          const std::vector<double>& w, const MechanismSpec& mech) {
  const int i = order[r];
  if (mech.family == Family::GFP) return bids[i];
  const double rho = r + 1 < static_cast<int>(order.size()) ? effective_bid(bids[order[r + 1]], w[order[r + 1]]) : 0.0;
  return rounded_price(rho, w[i], bids[i], mech.rounding);
}

// Calls visit(order, probability) for every realized ranking of participants.
template <class Visit>
void for_each_order(const std::vector<std::vector<int>>& blocks, bool randomize, Visit&& visit) {
  std::vector<std::vector<int>> perm = blocks;
  double count = 1.0;
  if (randomize)
    for (const auto& b : blocks) count *= factorial(static_cast<int>(b.size()));
  const double prob = 1.0 / count;
  std::vector<int> order;
  auto rec = [&](auto&& self, std::size_t bi) -> void {
    if (bi == perm.size()) {
      order.clear();
      for (const auto& b : perm) order.insert(order.end(), b.begin(), b.end());
      visit(order, prob);
      return;
    }
    if (!randomize) {
      self(self, bi + 1);
      return;
    }
    std::sort(perm[bi].begin(), perm[bi].end());
    do self(self, bi + 1);
    while (std::next_permutation(perm[bi].begin(), perm[bi].end()));
  };
  rec(rec, 0);
}

inline double lottery_size(const std::vector<std::vector<int>>& blocks) {
  double count = 1.0;
  for (const auto& b : blocks) count *= factorial(static_cast<int>(b.size()));
  return count;
}

inline void check_bids(int n, const std::vector<int>& bids, const MechanismSpec& mech) {
  if (static_cast<int>(bids.size()) != n) throw std::invalid_argument("one bid per agent required");
  for (int b : bids)
    if (b < 0 || b > mech.k_max) throw std::invalid_argument("bid outside 0..k_max");
}

inline Outcome simulate_auction(const AuctionSetting& s, const MechanismSpec& mech, const std::vector<int>& bids) {
  const auto w = apply_weight_rule(Setting{s}, mech);
  const auto blocks = ranked_blocks(bids, w);
  const bool randomize = mech.tie_rule == TieRule::UniformRandom;
  Outcome o;
  o.placements.assign(s.n, {});
  auto unallocated = [&](int i, double prob) { add_placement(o.placements[i], Placement{-1, prob, 0.0, 0.0, 0.0}); };

  if (!randomize || lottery_size(blocks) <= static_cast<double>(kJointLotteryCap)) {
    for_each_order(blocks, randomize, [&](const std::vector<int>& order, double prob) {
      std::vector<int> slot(s.n, -1);
      for (int r = 0; r < static_cast<int>(order.size()); ++r) {
        const int i = order[r];
        if (r < s.m) {
          slot[i] = r;
          add_placement(o.placements[i],
                        Placement{r, prob, s.clicks[i][r], s.values[i][r], order_price(order, r, bids, w, mech)});
        } else {
          unallocated(i, prob);
        }
      }
      for (int i = 0; i < s.n; ++i)
        if (bids[i] == 0) unallocated(i, prob);
      o.allocation.emplace_back(std::move(slot), prob);
    });
  } else {
    // Too many orders to list: each block member is equally likely at each of
    // the block's ranks, and only the block's bottom rank sees the next block.
    o.joint_lottery = false;
    int top = 0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto& b = blocks[bi];
      const int ell = static_cast<int>(b.size());
      const double rho = bi + 1 < blocks.size() ? effective_bid(bids[blocks[bi + 1][0]], w[blocks[bi + 1][0]]) : 0.0;
      for (int i : b)
        for (int r = top; r < top + ell; ++r) {
          if (r >= s.m) {
            unallocated(i, 1.0 / ell);
            continue;
          }
          double price = bids[i];
          if (mech.family == Family::GSP)
            price = r == top + ell - 1 ? rounded_price(rho, w[i], bids[i], mech.rounding)
                                       : rounded_price(effective_bid(bids[i], w[i]), w[i], bids[i], mech.rounding);
          add_placement(o.placements[i], Placement{r, 1.0 / ell, s.clicks[i][r], s.values[i][r], price});
        }
      top += ell;
    }
    for (int i = 0; i < s.n; ++i)
      if (bids[i] == 0) unallocated(i, 1.0);
  }
  finish_outcome(o);
  return o;
}

inline Outcome simulate_gim(const GimSetting& s, const MechanismSpec& mech, const std::vector<int>& bids) {
  const auto w = apply_weight_rule(Setting{s}, mech);
  const auto blocks = ranked_blocks(bids, w);
  Outcome o;
  o.placements.assign(s.n, {});
  auto unallocated = [&](int i, double prob) { add_placement(o.placements[i], Placement{-1, prob, 0.0, 0.0, 0.0}); };
  const bool joint = mech.tie_rule == TieRule::Lexicographic ||
                     (mech.gim_lottery == GimLottery::Permutation && lottery_size(blocks) <= static_cast<double>(kJointLotteryCap));
  if (joint) {
    for_each_order(blocks, mech.tie_rule == TieRule::UniformRandom, [&](const std::vector<int>& order, double prob) {
      std::vector<int> slot(s.n, -1);
      std::uint32_t above = 0;
      for (int r = 0; r < static_cast<int>(order.size()); ++r) {
        const int i = order[r];
        if (r < s.m) {
          slot[i] = r;
          o.placements[i].push_back(Placement{r, prob, s.qualities[i] * s.f(i, above), s.values[i],
                                              order_price(order, r, bids, w, mech)});
        } else {
          unallocated(i, prob);
        }
        above |= 1u << i;
      }
      for (int i = 0; i < s.n; ++i)
        if (bids[i] == 0) unallocated(i, prob);
      o.allocation.emplace_back(std::move(slot), prob);
    });
  } else {
    // Tied rivals are placed above each agent by an agent-specific lottery.
    o.joint_lottery = false;
    std::uint32_t higher = 0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const auto& b = blocks[bi];
      const double rho = bi + 1 < blocks.size() ? effective_bid(bids[blocks[bi + 1][0]], w[blocks[bi + 1][0]]) : 0.0;
      for (int i : b) {
        std::vector<int> rivals;
        for (int j : b)
          if (j != i) rivals.push_back(j);
        const int ell = static_cast<int>(rivals.size());
        for (std::uint32_t pick = 0; pick < (1u << ell); ++pick) {
          std::uint32_t above = higher;
          const int count = std::popcount(pick);
          for (int t = 0; t < ell; ++t)
            if (pick >> t & 1u) above |= 1u << rivals[t];
          double prob = 0.0;
          if (mech.gim_lottery == GimLottery::Subset) {
            prob = std::ldexp(1.0, -ell);
          } else {
            prob = factorial(count) * factorial(ell - count) / factorial(ell + 1);
          }
          const int r = std::popcount(above);
          if (r >= s.m) {
            unallocated(i, prob);
            continue;
          }
          double price = bids[i];
          if (mech.family == Family::GSP) {
            const double next = count == ell ? rho : effective_bid(bids[i], w[i]);
            price = rounded_price(next, w[i], bids[i], mech.rounding);
          }
          o.placements[i].push_back(Placement{r, prob, s.qualities[i] * s.f(i, above), s.values[i], price});
        }
      }
      for (int i : b) higher |= 1u << i;
    }
    for (int i = 0; i < s.n; ++i)
      if (bids[i] == 0) unallocated(i, 1.0);
  }
  finish_outcome(o);
  return o;
}

}  // namespace detail

inline Outcome simulate_outcome(const Setting& setting, const MechanismSpec& mech, const std::vector<int>& bids) {
  detail::check_bids(agent_count(setting), bids, mech);
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) return detail::simulate_auction(*a, mech, bids);
  return detail::simulate_gim(std::get<GimSetting>(setting), mech, bids);
}

// ---------------------------------------------------------------------------
// Welfare and click optimization

// Maximum-weight assignment of rows to columns for a square nonnegative
// profit matrix. Returns the column of each row.
inline std::vector<int> hungarian_max(const std::vector<std::vector<double>>& profit) {
  const int n = static_cast<int>(profit.size());
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials over rows (u) and columns (v); p[col] = row.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int row = 1; row <= n; ++row) {
    p[0] = row;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -profit[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(n, -1);
  for (int j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
  return col;
}

struct WelfareSolution {
  // No-externality: slot per agent (-1 unallocated). Externality: the same,
  // with slots given by rank in `order`.
  std::vector<int> slot_of;
  std::vector<int> order;  // agents top to bottom (externality settings)
  double welfare = 0.0;
};

// Sum of per-agent objective contributions for a fixed assignment; used for
// both the optimizer's reported value and realized welfare so that equal
// assignments give bit-identical totals.
inline double assignment_total(const AuctionSetting& s, const std::vector<std::vector<double>>& per_click,
                               const std::vector<int>& slot_of, int skip_agent = -1) {
  double total = 0.0;
  for (int i = 0; i < s.n; ++i)
    if (i != skip_agent && slot_of[i] >= 0) total += s.clicks[i][slot_of[i]] * per_click[i][slot_of[i]];
  return total;
}

inline double order_total(const GimSetting& s, const std::vector<double>& per_click, const std::vector<int>& order,
                          int skip_agent = -1) {
  double total = 0.0;
  std::uint32_t above = 0;
  for (int i : order) {
    if (i != skip_agent) total += s.qualities[i] * s.f(i, above) * per_click[i];
    above |= 1u << i;
  }
  return total;
}

namespace detail {

inline WelfareSolution best_assignment(const AuctionSetting& s, const std::vector<std::vector<double>>& per_click,
                                       int excluded = -1) {
  std::vector<std::vector<double>> profit(s.n, std::vector<double>(s.n, 0.0));
  for (int i = 0; i < s.n; ++i)
    if (i != excluded)
      for (int j = 0; j < std::min(s.n, s.m); ++j) profit[i][j] = s.clicks[i][j] * per_click[i][j];
  const auto col = hungarian_max(profit);
  WelfareSolution sol;
  sol.slot_of.assign(s.n, -1);
  for (int i = 0; i < s.n; ++i)
    if (i != excluded && col[i] < s.m && profit[i][col[i]] > 0.0) sol.slot_of[i] = col[i];
  sol.welfare = assignment_total(s, per_click, sol.slot_of);
  return sol;
}

// Best ordered subset of at most m agents from `available`.
inline WelfareSolution best_order(const GimSetting& s, const std::vector<double>& per_click, std::uint32_t available) {
  const std::uint32_t full = 1u << s.n;
  std::vector<double> best(full, -1.0);
  std::vector<int> last(full, -1);
  best[0] = 0.0;
  std::uint32_t best_set = 0;
  for (std::uint32_t set = 1; set < full; ++set) {
    if ((set & ~available) != 0 || std::popcount(set) > s.m) continue;
    for (int i = 0; i < s.n; ++i) {
      if (!(set >> i & 1u)) continue;
      const std::uint32_t rest = set & ~(1u << i);
      const double cand = best[rest] + s.qualities[i] * s.f(i, rest) * per_click[i];
      if (cand > best[set]) {
        best[set] = cand;
        last[set] = i;
      }
    }
    if (best[set] > best[best_set]) best_set = set;
  }
  WelfareSolution sol;
  for (std::uint32_t set = best_set; set != 0; set &= ~(1u << last[set])) sol.order.push_back(last[set]);
  std::reverse(sol.order.begin(), sol.order.end());
  sol.slot_of.assign(s.n, -1);
  for (int r = 0; r < static_cast<int>(sol.order.size()); ++r) sol.slot_of[sol.order[r]] = r;
  sol.welfare = order_total(s, per_click, sol.order);
  return sol;
}

inline std::uint32_t all_agents(int n) { return n >= 32 ? ~0u : (1u << n) - 1u; }

}  // namespace detail

inline WelfareSolution max_welfare(const Setting& setting) {
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) return detail::best_assignment(*a, a->values);
  const auto& g = std::get<GimSetting>(setting);
  return detail::best_order(g, g.values, detail::all_agents(g.n));
}

inline double max_clicks(const Setting& setting) {
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) {
    const std::vector<std::vector<double>> ones(a->n, std::vector<double>(a->n, 1.0));
    return detail::best_assignment(*a, ones).welfare;
  }
  const auto& g = std::get<GimSetting>(setting);
  return detail::best_order(g, std::vector<double>(g.n, 1.0), detail::all_agents(g.n)).welfare;
}

// ---------------------------------------------------------------------------
// VCG

// Half-up rounding of a value to the integer grid 0..k_max.
inline double grid_round(double value, int k_max) {
  return std::clamp(round_half_up(value), 0.0, static_cast<double>(k_max));
}

struct VcgOutcome {
  Outcome outcome;
  WelfareSolution allocation;
  std::vector<double> total_payment;  // Clarke payments, possibly negative
};

// Truthful VCG; with a grid, reports are the nearest grid values.
inline VcgOutcome vcg(const Setting& setting, std::optional<int> grid_k_max = std::nullopt) {
  VcgOutcome r;
  Outcome& o = r.outcome;
  const int n = agent_count(setting);
  o.placements.assign(n, {});
  auto report = [&](double v) { return grid_k_max ? grid_round(v, *grid_k_max) : v; };

  if (const auto* a = std::get_if<AuctionSetting>(&setting)) {
    auto reported = a->values;
    for (auto& row : reported)
      for (double& v : row) v = report(v);
    r.allocation = detail::best_assignment(*a, reported);
    r.total_payment.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double without = detail::best_assignment(*a, reported, i).welfare;
      const double others = assignment_total(*a, reported, r.allocation.slot_of, i);
      r.total_payment[i] = without - others;
    }
    std::vector<int> slot = r.allocation.slot_of;
    for (int i = 0; i < n; ++i) {
      const int j = slot[i];
      if (j < 0) {
        o.placements[i].push_back(Placement{-1, 1.0, 0.0, 0.0, 0.0});
        continue;
      }
      const double c = a->clicks[i][j];
      o.placements[i].push_back(Placement{j, 1.0, c, a->values[i][j], c > 0.0 ? r.total_payment[i] / c : 0.0});
    }
    o.allocation.emplace_back(slot, 1.0);
  } else {
    const auto& g = std::get<GimSetting>(setting);
    std::vector<double> reported = g.values;
    for (double& v : reported) v = report(v);
    const std::uint32_t everyone = detail::all_agents(n);
    r.allocation = detail::best_order(g, reported, everyone);
    r.total_payment.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double without = detail::best_order(g, reported, everyone & ~(1u << i)).welfare;
      const double others = order_total(g, reported, r.allocation.order, i);
      r.total_payment[i] = without - others;
    }
    std::uint32_t above = 0;
    std::vector<double> clicks(n, 0.0);
    for (int i : r.allocation.order) {
      clicks[i] = g.qualities[i] * g.f(i, above);
      above |= 1u << i;
    }
    for (int i = 0; i < n; ++i) {
      const int j = r.allocation.slot_of[i];
      if (j < 0) {
        o.placements[i].push_back(Placement{-1, 1.0, 0.0, 0.0, 0.0});
        continue;
      }
      o.placements[i].push_back(
          Placement{j, 1.0, clicks[i], g.values[i], clicks[i] > 0.0 ? r.total_payment[i] / clicks[i] : 0.0});
    }
    o.allocation.emplace_back(r.allocation.slot_of, 1.0);
  }
  detail::finish_outcome(o);
  // Zero-click winners pay their total directly.
  for (int i = 0; i < n; ++i)
    if (o.agent_clicks[i] == 0.0 && r.total_payment[i] != 0.0) {
      o.payment[i] = r.total_payment[i];
      o.expected_utility[i] = -r.total_payment[i];
    }
  o.revenue = std::accumulate(o.payment.begin(), o.payment.end(), 0.0);
  // Realized welfare summed the same way as max_welfare for identical allocations.
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) o.welfare = assignment_total(*a, a->values, r.allocation.slot_of);
  else {
    const auto& g = std::get<GimSetting>(setting);
    o.welfare = order_total(g, g.values, r.allocation.order);
  }
  return r;
}

}  // namespace posauc
