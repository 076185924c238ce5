#pragma once

// Brute-force reference computations used only by tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "posauc/mechanisms.hpp"
#include "posauc/model.hpp"

namespace oracle {

using posauc::AuctionSetting;
using posauc::GimSetting;
using posauc::MechanismSpec;
using posauc::Setting;

// All profiles over per-agent bid lists, agent 0 most significant.
inline void for_each_profile(const std::vector<std::vector<int>>& bids,
                             const std::function<void(const std::vector<int>&)>& visit) {
  const int n = static_cast<int>(bids.size());
  std::vector<int> idx(n, 0), profile(n);
  while (true) {
    for (int i = 0; i < n; ++i) profile[i] = bids[i][idx[i]];
    visit(profile);
    int a = n - 1;
    while (a >= 0 && ++idx[a] == static_cast<int>(bids[a].size())) idx[a--] = 0;
    if (a < 0) return;
  }
}

// Normal-form PSNE enumeration with utilities from the direct simulator.
inline std::vector<std::vector<int>> brute_psne(const Setting& s, const MechanismSpec& mech,
                                                const std::vector<std::vector<int>>& bids, double tol = 1e-9) {
  std::vector<std::vector<int>> out;
  for_each_profile(bids, [&](const std::vector<int>& p) {
    const auto base = posauc::simulate_outcome(s, mech, p).expected_utility;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto q = p;
      for (int b : bids[i]) {
        if (b == p[i]) continue;
        q[i] = b;
        if (posauc::simulate_outcome(s, mech, q).expected_utility[i] > base[i] + tol) return;
      }
    }
    out.push_back(p);
  });
  return out;
}

// Maximum of sum c*objective over injective maps of agents to the first m slots.
inline double brute_assignment(const AuctionSetting& s, const std::vector<std::vector<double>>& per_click,
                               int excluded = -1) {
  const int slots = std::min(s.n, s.m);
  double best = 0.0;
  std::vector<int> slot_used(slots, 0);
  std::function<void(int, double)> rec = [&](int i, double acc) {
    if (i == s.n) {
      best = std::max(best, acc);
      return;
    }
    rec(i + 1, acc);
    if (i == excluded) return;
    for (int j = 0; j < slots; ++j)
      if (!slot_used[j]) {
        slot_used[j] = 1;
        rec(i + 1, acc + s.clicks[i][j] * per_click[i][j]);
        slot_used[j] = 0;
      }
  };
  rec(0, 0.0);
  return best;
}

// Maximum over ordered subsets of at most m agents.
inline double brute_order(const GimSetting& s, const std::vector<double>& per_click, int excluded = -1) {
  double best = 0.0;
  std::vector<int> order;
  std::function<void(std::uint32_t, double)> rec = [&](std::uint32_t used, double acc) {
    best = std::max(best, acc);
    if (static_cast<int>(order.size()) == s.m) return;
    for (int i = 0; i < s.n; ++i) {
      if (i == excluded || (used >> i & 1u)) continue;
      order.push_back(i);
      rec(used | (1u << i), acc + s.qualities[i] * s.f(i, used) * per_click[i]);
      order.pop_back();
    }
  };
  rec(0u, 0.0);
  return best;
}

inline double brute_max_welfare(const Setting& s) {
  if (const auto* a = std::get_if<AuctionSetting>(&s)) return brute_assignment(*a, a->values);
  const auto& g = std::get<GimSetting>(s);
  return brute_order(g, g.values);
}

inline double brute_max_clicks(const Setting& s) {
  if (const auto* a = std::get_if<AuctionSetting>(&s))
    return brute_assignment(*a, std::vector<std::vector<double>>(a->n, std::vector<double>(a->n, 1.0)));
  const auto& g = std::get<GimSetting>(s);
  return brute_order(g, std::vector<double>(g.n, 1.0));
}

}  // namespace oracle
