#pragma once

// Compiles position auctions into action-graph games.
//
// No-externality settings: per effective-bid level e there is a Sum node
// (=,e) counting bidders at e and a Sum node (>=,e) counting bidders at or
// above e, chained from the top level down. GSP adds one WeightedArgmax price
// node per level whose in-arcs are the (=,e') nodes of all lower positive
// levels, weighted by e'. Lexicographic ties add a per-action Sum node
// counting lower-indexed agents at the same level.
//
// Externality settings: every action node reads, for each rival j, whether j
// sits at the same level (j's action node at that level) and whether j sits
// strictly higher (an Or chain over j's higher actions), plus the price node.
//
// A zero bid is a non-participation bid: its action node has no in-arcs and
// a constant payoff of 0.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "posauc/agg.hpp"
#include "posauc/mechanism_spec.hpp"
#include "posauc/model.hpp"

namespace posauc {

class EncodingTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncodeOptions {
  // Per-agent bid lists (ascending, starting at 0). Empty means 0..k_max for everyone.
  std::vector<std::vector<int>> bids;
  std::size_t max_levels = 100000;
  long long max_table_entries = 50'000'000;
};

struct EffectiveBidIndex {
  std::vector<double> levels;             // strictly increasing; levels[0] == 0
  std::vector<std::vector<int>> level_of;  // [agent][bid index]

  static EffectiveBidIndex build(const std::vector<double>& weights, const std::vector<std::vector<int>>& bids,
                                 std::size_t max_levels = 100000) {
    EffectiveBidIndex idx;
    std::vector<double> all{0.0};
    for (std::size_t i = 0; i < bids.size(); ++i)
      for (int k : bids[i]) all.push_back(effective_bid(k, weights[i]));
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > max_levels) throw EncodingTooLarge("too many distinct effective bids");
    idx.levels = std::move(all);
    idx.level_of.resize(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i)
      for (int k : bids[i]) {
        const double e = effective_bid(k, weights[i]);
        idx.level_of[i].push_back(static_cast<int>(std::lower_bound(idx.levels.begin(), idx.levels.end(), e) -
                                                   idx.levels.begin()));
      }
    return idx;
  }

  int level_count() const { return static_cast<int>(levels.size()); }
};

struct EncodedGame {
  ActionGraphGame game;
  MechanismSpec mech;
  std::vector<std::vector<int>> bids;  // profile index -> bid, per agent
  std::vector<double> weights;
  EffectiveBidIndex index;

  std::vector<int> bids_of(const Profile& profile) const {
    std::vector<int> out(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) out[i] = bids[i][profile[i]];
    return out;
  }

  Profile profile_of(const std::vector<int>& bid_vector) const {
    Profile p(bid_vector.size());
    for (std::size_t i = 0; i < bid_vector.size(); ++i) {
      const auto it = std::lower_bound(bids[i].begin(), bids[i].end(), bid_vector[i]);
      if (it == bids[i].end() || *it != bid_vector[i]) throw std::invalid_argument("bid outside the encoded action set");
      p[i] = static_cast<int>(it - bids[i].begin());
    }
    return p;
  }
};

inline std::vector<std::vector<int>> full_bid_grid(int n, int k_max) {
  std::vector<int> grid(k_max + 1);
  for (int k = 0; k <= k_max; ++k) grid[k] = k;
  return std::vector<std::vector<int>>(n, grid);
}

namespace detail {

inline std::vector<std::vector<int>> resolve_bids(int n, const MechanismSpec& mech, const EncodeOptions& opt) {
  if (opt.bids.empty()) return full_bid_grid(n, mech.k_max);
  if (static_cast<int>(opt.bids.size()) != n) throw std::invalid_argument("bid lists must cover every agent");
  for (const auto& b : opt.bids) {
    if (b.empty() || b.front() != 0) throw std::invalid_argument("bid lists must start at 0");
    for (std::size_t t = 0; t < b.size(); ++t)
      if (b[t] < 0 || b[t] > mech.k_max || (t > 0 && b[t] <= b[t - 1]))
        throw std::invalid_argument("bid lists must be strictly increasing within 0..k_max");
  }
  return opt.bids;
}

// Rival j's possible positions relative to a level t: below (with the level
// it sits at), tied, or strictly higher.
struct RivalOptions {
  std::vector<int> below;  // distinct levels < t
  bool tied = false;
  bool higher = false;
};

inline RivalOptions rival_options(const EffectiveBidIndex& idx, int j, int t, bool track_below) {
  RivalOptions o;
  std::set<int> below;
  for (int s : idx.level_of[j]) {
    if (s < t) below.insert(track_below ? s : 0);
    else if (s == t) o.tied = true;
    else o.higher = true;
  }
  o.below.assign(below.begin(), below.end());
  return o;
}

struct TableBudget {
  long long used = 0;
  long long cap = 0;
  void add(long long entries) {
    used += entries;
    if (used > cap) throw EncodingTooLarge("utility tables exceed the configured entry cap");
  }
};

inline void check_setting_for(const Setting& setting, const MechanismSpec& mech) {
  check_mechanism(mech);
  const auto violations = validate_setting(setting);
  if (!violations.empty()) throw std::invalid_argument("invalid setting: " + violations.front());
}

}  // namespace detail

inline EncodedGame encode_no_externality(const AuctionSetting& s, const MechanismSpec& mech,
                                         const EncodeOptions& opt = {}) {
  detail::check_setting_for(Setting{s}, mech);
  EncodedGame out;
  out.mech = mech;
  out.bids = detail::resolve_bids(s.n, mech, opt);
  out.weights = apply_weight_rule(Setting{s}, mech);
  out.index = EffectiveBidIndex::build(out.weights, out.bids, opt.max_levels);
  const auto& idx = out.index;
  const int T = idx.level_count();
  const bool gsp = mech.family == Family::GSP;
  const bool lex = mech.tie_rule == TieRule::Lexicographic;
  ActionGraphGame& g = out.game;
  g.set_agent_count(s.n);

  std::vector<std::vector<int>> action(s.n);
  for (int i = 0; i < s.n; ++i)
    for (int k : out.bids[i]) action[i].push_back(g.add_action_node(i, "a" + std::to_string(i) + "_" + std::to_string(k)));

  std::vector<int> eq(T, -1), ge(T, -1), price(T, -1);
  for (int t = 1; t < T; ++t) eq[t] = g.add_function_node(NodeKind::Sum, "eq" + std::to_string(t));
  for (int i = 0; i < s.n; ++i)
    for (std::size_t b = 0; b < out.bids[i].size(); ++b)
      if (const int t = idx.level_of[i][b]; t > 0) g.add_arc(action[i][b], eq[t]);
  for (int t = T - 1; t >= 1; --t) {
    ge[t] = g.add_function_node(NodeKind::Sum, "ge" + std::to_string(t));
    g.add_arc(eq[t], ge[t]);
    if (t + 1 < T) g.add_arc(ge[t + 1], ge[t]);
  }
  if (gsp)
    for (int t = 2; t < T; ++t) {
      price[t] = g.add_function_node(NodeKind::WeightedArgmax, "price" + std::to_string(t));
      for (int u = 1; u < t; ++u) g.add_arc(eq[u], price[t], idx.levels[u]);
    }

  std::vector<std::vector<int>> tie_ahead(s.n);
  for (int i = 0; i < s.n; ++i)
    for (std::size_t b = 0; b < out.bids[i].size(); ++b) {
      const int t = idx.level_of[i][b];
      const int node = action[i][b];
      int ta = -1;
      if (t > 0) {
        g.add_arc(eq[t], node);
        g.add_arc(ge[t], node);
        if (price[t] >= 0) g.add_arc(price[t], node);
        if (lex) {
          for (int j = 0; j < i; ++j)
            for (std::size_t c = 0; c < out.bids[j].size(); ++c)
              if (idx.level_of[j][c] == t) {
                if (ta < 0) {
                  ta = g.add_function_node(NodeKind::Sum, "ahead" + std::to_string(i) + "_" + std::to_string(out.bids[i][b]));
                  g.add_arc(ta, node);
                }
                g.add_arc(action[j][c], ta);
              }
        }
      }
      tie_ahead[i].push_back(ta);
    }
  g.finalize();

  detail::TableBudget budget{0, opt.max_table_entries};
  for (int i = 0; i < s.n; ++i) {
    for (std::size_t b = 0; b < out.bids[i].size(); ++b) {
      const int node = action[i][b];
      const int t = idx.level_of[i][b];
      const int k = out.bids[i][b];
      if (t == 0) {
        budget.add(1);
        g.set_payoff(node, 0, 0.0);
        continue;
      }
      // Reachable (tied rivals, higher rivals, price level, tied rivals ahead).
      std::set<std::array<int, 4>> states{{0, 0, 0, 0}};
      for (int j = 0; j < s.n; ++j) {
        if (j == i) continue;
        const auto o = detail::rival_options(idx, j, t, gsp);
        std::set<std::array<int, 4>> next;
        for (const auto& st : states) {
          for (int lv : o.below) next.insert({st[0], st[1], std::max(st[2], lv), st[3]});
          if (o.tied) next.insert({st[0] + 1, st[1], st[2], st[3] + (lex && j < i ? 1 : 0)});
          if (o.higher) next.insert({st[0], st[1] + 1, st[2], st[3]});
        }
        states.swap(next);
      }
      budget.add(static_cast<long long>(states.size()));
      const bool has_price = price[t] >= 0;
      const bool has_ahead = tie_ahead[i][b] >= 0;
      for (const auto& st : states) {
        const int ell = st[0] + 1;
        const int above = st[1];
        const int rho_level = st[2];
        const int ahead = st[3];
        auto pay = [&](int pos, bool bottom_of_block) {
          int p = k;
          if (gsp && bottom_of_block) p = rounded_price(idx.levels[rho_level], out.weights[i], k, mech.rounding);
          return s.clicks[i][pos] * (s.values[i][pos] - p);
        };
        double u = 0.0;
        if (lex) {
          u = pay(above + ahead, ahead == ell - 1);
        } else {
          for (int pos = above; pos < above + ell; ++pos) u += pay(pos, pos == above + ell - 1);
          u /= ell;
        }
        std::vector<int> cfg{ell, ell + above};
        if (has_price) cfg.push_back(rho_level);  // in-arc u of the price node is level u
        if (has_ahead) cfg.push_back(ahead);
        g.set_payoff(node, g.pack(node, cfg), u);
      }
    }
  }
  return out;
}

inline EncodedGame encode_gfp(const AuctionSetting& s, const MechanismSpec& mech, const EncodeOptions& opt = {}) {
  if (mech.family != Family::GFP) throw std::invalid_argument("encode_gfp needs a GFP mechanism");
  return encode_no_externality(s, mech, opt);
}

inline EncodedGame encode_gsp(const AuctionSetting& s, const MechanismSpec& mech, const EncodeOptions& opt = {}) {
  if (mech.family != Family::GSP) throw std::invalid_argument("encode_gsp needs a GSP mechanism");
  return encode_no_externality(s, mech, opt);
}

// Probability weight of the tied rivals in S being above the agent when |L|
// rivals are tied with it.
inline double tie_subset_weight(GimLottery lottery, int tied, int above) {
  if (lottery == GimLottery::Subset) return std::ldexp(1.0, -tied);
  double w = 1.0 / (tied + 1);
  // s!(l-s)!/l! = 1 / C(l, s)
  double binom = 1.0;
  for (int r = 1; r <= above; ++r) binom = binom * (tied - above + r) / r;
  return w / binom;
}

inline EncodedGame encode_gim(const GimSetting& s, const MechanismSpec& mech, const EncodeOptions& opt = {}) {
  detail::check_setting_for(Setting{s}, mech);
  if (s.n > 20) throw EncodingTooLarge("externality settings are limited to 20 agents");
  EncodedGame out;
  out.mech = mech;
  out.bids = detail::resolve_bids(s.n, mech, opt);
  out.weights = apply_weight_rule(Setting{s}, mech);
  out.index = EffectiveBidIndex::build(out.weights, out.bids, opt.max_levels);
  const auto& idx = out.index;
  const int T = idx.level_count();
  const int n = s.n;
  const bool gsp = mech.family == Family::GSP;
  const bool lex = mech.tie_rule == TieRule::Lexicographic;
  ActionGraphGame& g = out.game;
  g.set_agent_count(n);

  std::vector<std::vector<int>> action(n);
  std::vector<std::vector<int>> at_level(n, std::vector<int>(T, -1));
  for (int i = 0; i < n; ++i)
    for (std::size_t b = 0; b < out.bids[i].size(); ++b) {
      const int node = g.add_action_node(i, "a" + std::to_string(i) + "_" + std::to_string(out.bids[i][b]));
      action[i].push_back(node);
      at_level[i][idx.level_of[i][b]] = node;
    }
  // at_or_above[j][t]: Or node "j bids at level >= t", for t among j's positive levels.
  std::vector<std::vector<int>> at_or_above(n, std::vector<int>(T, -1));
  for (int j = 0; j < n; ++j) {
    int prev = -1;
    for (int t = T - 1; t >= 1; --t) {
      if (at_level[j][t] < 0) continue;
      const int node = g.add_function_node(NodeKind::Or, "ge" + std::to_string(j) + "_" + std::to_string(t));
      g.add_arc(at_level[j][t], node);
      if (prev >= 0) g.add_arc(prev, node);
      at_or_above[j][t] = node;
      prev = node;
    }
  }
  std::vector<int> eq(T, -1), price(T, -1);
  if (gsp) {
    for (int t = 1; t < T; ++t) {
      eq[t] = g.add_function_node(NodeKind::Sum, "eq" + std::to_string(t));
      for (int j = 0; j < n; ++j)
        if (at_level[j][t] >= 0) g.add_arc(at_level[j][t], eq[t]);
    }
    for (int t = 2; t < T; ++t) {
      price[t] = g.add_function_node(NodeKind::WeightedArgmax, "price" + std::to_string(t));
      for (int u = 1; u < t; ++u) g.add_arc(eq[u], price[t], idx.levels[u]);
    }
  }
  auto higher_source = [&](int j, int t) {
    for (int u = t + 1; u < T; ++u)
      if (at_level[j][u] >= 0) return at_or_above[j][u];
    return -1;
  };
  struct Wiring {
    std::vector<int> tied_slot;   // per rival: in-arc index or -1
    std::vector<int> higher_slot;
    int price_slot = -1;
    int arity = 0;
  };
  std::vector<std::vector<Wiring>> wiring(n);
  for (int i = 0; i < n; ++i)
    for (std::size_t b = 0; b < out.bids[i].size(); ++b) {
      Wiring w;
      w.tied_slot.assign(n, -1);
      w.higher_slot.assign(n, -1);
      const int t = idx.level_of[i][b];
      const int node = action[i][b];
      if (t > 0) {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          if (at_level[j][t] >= 0) {
            g.add_arc(at_level[j][t], node);
            w.tied_slot[j] = w.arity++;
          }
          if (const int h = higher_source(j, t); h >= 0) {
            g.add_arc(h, node);
            w.higher_slot[j] = w.arity++;
          }
        }
        if (price[t] >= 0) {
          g.add_arc(price[t], node);
          w.price_slot = w.arity++;
        }
      }
      wiring[i].push_back(std::move(w));
    }
  g.finalize();

  detail::TableBudget budget{0, opt.max_table_entries};
  for (int i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < out.bids[i].size(); ++b) {
      const int node = action[i][b];
      const int t = idx.level_of[i][b];
      const int k = out.bids[i][b];
      if (t == 0) {
        budget.add(1);
        g.set_payoff(node, 0, 0.0);
        continue;
      }
      // Reachable (tied mask, higher mask, price level) over full agent bitmasks.
      std::set<std::array<std::uint32_t, 3>> states{{0u, 0u, 0u}};
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto o = detail::rival_options(idx, j, t, gsp);
        std::set<std::array<std::uint32_t, 3>> next;
        for (const auto& st : states) {
          for (int lv : o.below) next.insert({st[0], st[1], std::max<std::uint32_t>(st[2], lv)});
          if (o.tied) next.insert({st[0] | (1u << j), st[1], st[2]});
          if (o.higher) next.insert({st[0], st[1] | (1u << j), st[2]});
        }
        states.swap(next);
        if (static_cast<long long>(states.size()) + budget.used > budget.cap)
          throw EncodingTooLarge("utility tables exceed the configured entry cap");
      }
      budget.add(static_cast<long long>(states.size()));
      const Wiring& w = wiring[i][b];
      std::vector<int> cfg(w.arity);
      for (const auto& st : states) {
        const std::uint32_t tied = st[0], higher = st[1];
        const int rho_level = static_cast<int>(st[2]);
        const int n_tied = std::popcount(tied);
        const int n_higher = std::popcount(higher);
        const int bottom_price = gsp ? rounded_price(idx.levels[rho_level], out.weights[i], k, mech.rounding) : k;
        auto term = [&](std::uint32_t subset) {
          if (n_higher + std::popcount(subset) >= s.m) return 0.0;
          const int p = subset == tied ? bottom_price : k;
          return s.qualities[i] * s.f(i, higher | subset) * (s.values[i] - p);
        };
        double u = 0.0;
        if (lex) {
          u = term(tied & ((1u << i) - 1u));
        } else {
          // Enumerate subsets of the tied mask.
          std::uint32_t sub = 0;
          do {
            u += tie_subset_weight(mech.gim_lottery, n_tied, std::popcount(sub)) * term(sub);
            sub = (sub - tied) & tied;
          } while (sub != 0);
        }
        for (int j = 0; j < n; ++j) {
          if (w.tied_slot[j] >= 0) cfg[w.tied_slot[j]] = (tied >> j) & 1u;
          if (w.higher_slot[j] >= 0) cfg[w.higher_slot[j]] = (higher >> j) & 1u;
        }
        if (w.price_slot >= 0) cfg[w.price_slot] = rho_level;
        g.set_payoff(node, g.pack(node, cfg), u);
      }
    }
  }
  return out;
}

inline EncodedGame encode(const Setting& setting, const MechanismSpec& mech, const EncodeOptions& opt = {}) {
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) return encode_no_externality(*a, mech, opt);
  return encode_gim(std::get<GimSetting>(setting), mech, opt);
}

}  // namespace posauc
