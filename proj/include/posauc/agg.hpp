#pragma once

// Action-graph games with contribution-independent function nodes.
//
// Each agent places one token on an action node from its action set. Function
// nodes derive a value from their in-arcs:
//   Sum             sum of source values
//   Or              1 if any source is positive
//   WeightedArgmax  index (1-based, in in-arc order) of the positive source
//                   with the largest arc weight; 0 when no source is positive
// An action node's payoff is read from its utility table, keyed by the values
// of its in-arc sources packed as a mixed-radix integer in in-arc order.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace posauc {

enum class NodeKind { Action, Sum, Or, WeightedArgmax };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Action: return "action";
    case NodeKind::Sum: return "sum";
    case NodeKind::Or: return "or";
    case NodeKind::WeightedArgmax: return "argmax";
  }
  return "?";
}

struct InArc {
  int source = -1;
  double weight = 0.0;  // only meaningful for WeightedArgmax targets
};

struct Node {
  NodeKind kind = NodeKind::Action;
  std::vector<InArc> in_arcs;
  int owner = -1;  // agent id for action nodes
  std::string label;
};

class GameStructureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MissingTableEntry : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Profile = std::vector<int>;  // per agent: index into its action set

class ActionGraphGame {
 public:
  int add_action_node(int owner, std::string label = {}) {
    nodes_.push_back(Node{NodeKind::Action, {}, owner, std::move(label)});
    if (owner >= static_cast<int>(action_sets_.size())) action_sets_.resize(owner + 1);
    action_sets_[owner].push_back(static_cast<int>(nodes_.size()) - 1);
    finalized_ = false;
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_function_node(NodeKind kind, std::string label = {}) {
    if (kind == NodeKind::Action) throw GameStructureError("use add_action_node for action nodes");
    nodes_.push_back(Node{kind, {}, -1, std::move(label)});
    finalized_ = false;
    return static_cast<int>(nodes_.size()) - 1;
  }

  void add_arc(int from, int to, double weight = 0.0) {
    if (from < 0 || to < 0 || from >= node_count() || to >= node_count())
      throw GameStructureError("arc references a missing node");
    nodes_[to].in_arcs.push_back(InArc{from, weight});
    finalized_ = false;
  }

  // Agents with no action nodes yet can be declared so empty games are representable.
  void set_agent_count(int n) {
    if (n < static_cast<int>(action_sets_.size())) throw GameStructureError("cannot drop agents");
    action_sets_.resize(n);
  }

  // Validates structure and prepares the packing radices and evaluation order.
  void finalize();

  void set_payoff(int action_node, std::uint64_t key, double payoff) { tables_[action_node][key] = payoff; }

  std::uint64_t pack(int action_node, std::span<const int> source_values) const {
    const auto& strides = strides_.at(action_node);
    if (source_values.size() != strides.size()) throw GameStructureError("configuration arity mismatch");
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < strides.size(); ++t) key += static_cast<std::uint64_t>(source_values[t]) * strides[t];
    return key;
  }

  int agent_count() const { return static_cast<int>(action_sets_.size()); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[id]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& action_set(int agent) const { return action_sets_[agent]; }
  const std::unordered_map<std::uint64_t, double>& table(int node) const { return tables_.at(node); }
  bool finalized() const { return finalized_; }

  // Largest value a node can take under any pure profile.
  int max_value(int node) const { return max_value_[node]; }
  const std::vector<int>& function_order() const { return function_order_; }
  // Function nodes whose value changes when a token is added at `action_node`
  // and that feed its own local configuration, in evaluation order.
  const std::vector<int>& affected(int action_node) const { return affected_.at(action_node); }

  double payoff_at(int action_node, std::uint64_t key) const {
    const auto& t = tables_.at(action_node);
    const auto it = t.find(key);
    if (it == t.end())
      throw MissingTableEntry("no utility entry for node " + std::to_string(action_node) + " (" +
                              nodes_[action_node].label + ") key " + std::to_string(key));
    return it->second;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> action_sets_;
  std::unordered_map<int, std::unordered_map<std::uint64_t, double>> tables_;
  std::unordered_map<int, std::vector<std::uint64_t>> strides_;
  std::unordered_map<int, std::vector<int>> affected_;
  std::vector<int> max_value_;
  std::vector<int> function_order_;
  bool finalized_ = false;
};

inline void ActionGraphGame::finalize() {
  const int count = node_count();
  for (int a = 0; a < agent_count(); ++a)
    if (action_sets_[a].empty()) throw GameStructureError("agent " + std::to_string(a) + " has no actions");

  // Kahn over function-node dependencies; action nodes are roots.
  std::vector<std::vector<int>> out(count);
  std::vector<int> pending(count, 0);
  for (int v = 0; v < count; ++v) {
    const Node& nd = nodes_[v];
    if (nd.kind == NodeKind::Action) continue;
    for (const auto& arc : nd.in_arcs) {
      const NodeKind sk = nodes_[arc.source].kind;
      if (nd.kind != NodeKind::WeightedArgmax && sk == NodeKind::WeightedArgmax)
        throw GameStructureError("sum/or node " + std::to_string(v) + " reads an argmax node");
      if (sk != NodeKind::Action) {
        out[arc.source].push_back(v);
        ++pending[v];
      }
    }
    if (nd.kind == NodeKind::WeightedArgmax) {
      std::vector<double> w;
      for (const auto& arc : nd.in_arcs) {
        if (!(arc.weight > 0.0)) throw GameStructureError("argmax node " + std::to_string(v) + " has a non-positive weight");
        w.push_back(arc.weight);
      }
      std::sort(w.begin(), w.end());
      if (std::adjacent_find(w.begin(), w.end()) != w.end())
        throw GameStructureError("argmax node " + std::to_string(v) + " has duplicate weights");
    }
  }
  function_order_.clear();
  std::vector<int> ready;
  for (int v = 0; v < count; ++v)
    if (nodes_[v].kind != NodeKind::Action && pending[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    function_order_.push_back(v);
    for (int w : out[v])
      if (--pending[w] == 0) ready.push_back(w);
  }
  int function_count = 0;
  for (const auto& nd : nodes_) function_count += nd.kind != NodeKind::Action;
  if (static_cast<int>(function_order_.size()) != function_count)
    throw GameStructureError("function-node graph has a cycle");

  // Value bounds.
  max_value_.assign(count, 0);
  std::vector<int> owners_of(count, 0);
  for (const auto& set : action_sets_)
    for (int v : set) ++owners_of[v];
  for (int v = 0; v < count; ++v)
    if (nodes_[v].kind == NodeKind::Action) max_value_[v] = owners_of[v];
  for (int v : function_order_) {
    const Node& nd = nodes_[v];
    long long bound = 0;
    switch (nd.kind) {
      case NodeKind::Sum:
        for (const auto& arc : nd.in_arcs) bound += max_value_[arc.source];
        break;
      case NodeKind::Or: bound = nd.in_arcs.empty() ? 0 : 1; break;
      case NodeKind::WeightedArgmax: bound = static_cast<long long>(nd.in_arcs.size()); break;
      case NodeKind::Action: break;
    }
    max_value_[v] = static_cast<int>(bound);
  }

  // Packing strides for action-node tables.
  strides_.clear();
  for (int v = 0; v < count; ++v) {
    if (nodes_[v].kind != NodeKind::Action) continue;
    std::vector<std::uint64_t> strides;
    std::uint64_t stride = 1;
    for (const auto& arc : nodes_[v].in_arcs) {
      strides.push_back(stride);
      const std::uint64_t radix = static_cast<std::uint64_t>(max_value_[arc.source]) + 1;
      if (stride > std::numeric_limits<std::uint64_t>::max() / radix)
        throw GameStructureError("configuration space of node " + std::to_string(v) + " overflows 64-bit keys");
      stride *= radix;
    }
    strides_[v] = std::move(strides);
    tables_[v];
  }

  // Incremental-evaluation sets.
  std::vector<int> topo_pos(count, -1);
  for (int t = 0; t < static_cast<int>(function_order_.size()); ++t) topo_pos[function_order_[t]] = t;
  std::vector<std::vector<int>> out_all(count);
  for (int v = 0; v < count; ++v)
    for (const auto& arc : nodes_[v].in_arcs) out_all[arc.source].push_back(v);
  affected_.clear();
  std::vector<char> down(count), up(count);
  std::vector<int> stack;
  for (int b = 0; b < count; ++b) {
    if (nodes_[b].kind != NodeKind::Action) continue;
    std::fill(down.begin(), down.end(), 0);
    std::fill(up.begin(), up.end(), 0);
    stack.assign(1, b);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : out_all[v])
        if (nodes_[w].kind != NodeKind::Action && !down[w]) {
          down[w] = 1;
          stack.push_back(w);
        }
    }
    for (const auto& arc : nodes_[b].in_arcs)
      if (nodes_[arc.source].kind != NodeKind::Action && !up[arc.source]) {
        up[arc.source] = 1;
        stack.push_back(arc.source);
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& arc : nodes_[v].in_arcs)
        if (nodes_[arc.source].kind != NodeKind::Action && !up[arc.source]) {
          up[arc.source] = 1;
          stack.push_back(arc.source);
        }
    }
    std::vector<int> both;
    for (int v = 0; v < count; ++v)
      if (down[v] && up[v]) both.push_back(v);
    std::sort(both.begin(), both.end(), [&](int x, int y) { return topo_pos[x] < topo_pos[y]; });
    affected_[b] = std::move(both);
  }
  finalized_ = true;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline int function_value(const ActionGraphGame& game, int v, std::span<const int> values) {
  const Node& nd = game.node(v);
  switch (nd.kind) {
    case NodeKind::Sum: {
      int s = 0;
      for (const auto& arc : nd.in_arcs) s += values[arc.source];
      return s;
    }
    case NodeKind::Or:
      for (const auto& arc : nd.in_arcs)
        if (values[arc.source] > 0) return 1;
      return 0;
    case NodeKind::WeightedArgmax: {
      int best = 0;
      double best_w = 0.0;
      for (int t = 0; t < static_cast<int>(nd.in_arcs.size()); ++t) {
        const auto& arc = nd.in_arcs[t];
        if (values[arc.source] > 0 && arc.weight > best_w) {
          best_w = arc.weight;
          best = t + 1;
        }
      }
      return best;
    }
    case NodeKind::Action: break;
  }
  return values[v];
}

inline void require_finalized(const ActionGraphGame& game) {
  if (!game.finalized()) throw GameStructureError("game must be finalized before evaluation");
}

inline void check_profile(const ActionGraphGame& game, const Profile& profile) {
  if (static_cast<int>(profile.size()) != game.agent_count()) throw std::invalid_argument("profile has wrong arity");
  for (int a = 0; a < game.agent_count(); ++a)
    if (profile[a] < 0 || profile[a] >= static_cast<int>(game.action_set(a).size()))
      throw std::invalid_argument("profile entry outside the agent's action set");
}

// Token counts, optionally leaving out one agent, followed by function values
// in the given order.
inline void compute_values(const ActionGraphGame& game, const Profile& profile, int skip_agent,
                           std::span<const int> order, std::vector<int>& values) {
  values.assign(game.node_count(), 0);
  for (int a = 0; a < game.agent_count(); ++a)
    if (a != skip_agent) ++values[game.action_set(a)[profile[a]]];
  for (int v : order) values[v] = function_value(game, v, values);
}

inline std::uint64_t local_key(const ActionGraphGame& game, int action_node, std::span<const int> values) {
  const Node& nd = game.node(action_node);
  int buf[64];
  std::vector<int> heap;
  int* cfg = buf;
  if (nd.in_arcs.size() > 64) {
    heap.resize(nd.in_arcs.size());
    cfg = heap.data();
  }
  for (std::size_t t = 0; t < nd.in_arcs.size(); ++t) cfg[t] = values[nd.in_arcs[t].source];
  return game.pack(action_node, std::span<const int>(cfg, nd.in_arcs.size()));
}

}  // namespace detail

// Full configuration (token counts and function values) for a pure profile.
inline std::vector<int> configuration(const ActionGraphGame& game, const Profile& profile) {
  detail::require_finalized(game);
  detail::check_profile(game, profile);
  std::vector<int> values;
  detail::compute_values(game, profile, -1, game.function_order(), values);
  return values;
}

// Same as configuration() with a caller-chosen function-node order, which
// must be topological.
inline std::vector<int> configuration(const ActionGraphGame& game, const Profile& profile,
                                      std::span<const int> order) {
  detail::require_finalized(game);
  detail::check_profile(game, profile);
  std::vector<int> values;
  detail::compute_values(game, profile, -1, order, values);
  return values;
}

inline std::vector<double> evaluate_profile(const ActionGraphGame& game, const Profile& profile) {
  const auto values = configuration(game, profile);
  std::vector<double> payoff(game.agent_count());
  for (int a = 0; a < game.agent_count(); ++a) {
    const int node = game.action_set(a)[profile[a]];
    payoff[a] = game.payoff_at(node, detail::local_key(game, node, values));
  }
  return payoff;
}

struct BestResponse {
  double best = 0.0;
  std::vector<int> actions;  // action indices within tolerance of best
  double current = 0.0;      // payoff of the profile's own action
};

// Re-entrant deviation evaluator; keep one per worker thread.
class DeviationEvaluator {
 public:
  explicit DeviationEvaluator(const ActionGraphGame& game) : game_(game) { detail::require_finalized(game); }

  // Payoffs of `agent` for each candidate action with all other agents fixed.
  // An empty candidate list means the agent's whole action set.
  void payoffs(const Profile& profile, int agent, std::span<const int> candidates, std::vector<double>& out) {
    detail::compute_values(game_, profile, agent, game_.function_order(), others_);
    scratch_ = others_;
    const int total = static_cast<int>(game_.action_set(agent).size());
    const int count = candidates.empty() ? total : static_cast<int>(candidates.size());
    out.resize(count);
    for (int c = 0; c < count; ++c) {
      const int action = candidates.empty() ? c : candidates[c];
      out[c] = payoff_with(agent, action);
    }
  }

  double payoff_with(int agent, int action) {
    const int node = game_.action_set(agent)[action];
    const auto& affected = game_.affected(node);
    ++scratch_[node];
    for (int v : affected) scratch_[v] = detail::function_value(game_, v, scratch_);
    const double p = game_.payoff_at(node, detail::local_key(game_, node, scratch_));
    --scratch_[node];
    for (int v : affected) scratch_[v] = others_[v];
    return p;
  }

 private:
  const ActionGraphGame& game_;
  std::vector<int> others_;
  std::vector<int> scratch_;
};

constexpr double kPayoffTolerance = 1e-9;

inline BestResponse deviation_best_response(const ActionGraphGame& game, const Profile& profile, int agent,
                                             std::span<const int> candidates = {}) {
  detail::check_profile(game, profile);
  DeviationEvaluator eval(game);
  std::vector<double> pay;
  eval.payoffs(profile, agent, candidates, pay);
  BestResponse r;
  r.best = *std::max_element(pay.begin(), pay.end());
  for (int c = 0; c < static_cast<int>(pay.size()); ++c)
    if (pay[c] >= r.best - kPayoffTolerance) r.actions.push_back(candidates.empty() ? c : candidates[c]);
  r.current = eval.payoff_with(agent, profile[agent]);
  return r;
}

struct SizeStats {
  long long action_nodes = 0;
  long long function_nodes = 0;
  long long total_table_entries = 0;
  bool operator==(const SizeStats&) const = default;
};

inline SizeStats size_stats(const ActionGraphGame& game) {
  SizeStats s;
  for (int v = 0; v < game.node_count(); ++v) {
    if (game.node(v).kind == NodeKind::Action) {
      ++s.action_nodes;
      if (game.finalized()) s.total_table_entries += static_cast<long long>(game.table(v).size());
    } else {
      ++s.function_nodes;
    }
  }
  return s;
}

// One node per line: id, kind, owner, label, in-arcs as source[:weight].
inline void dump(const ActionGraphGame& game, std::ostream& os) {
  for (int v = 0; v < game.node_count(); ++v) {
    const Node& nd = game.node(v);
    os << v << ' ' << to_string(nd.kind) << ' ' << nd.owner << ' ' << (nd.label.empty() ? "-" : nd.label);
    for (const auto& arc : nd.in_arcs) {
      os << ' ' << arc.source;
      if (nd.kind == NodeKind::WeightedArgmax) os << ':' << arc.weight;
    }
    os << '\n';
  }
}

inline std::string dump(const ActionGraphGame& game) {
  std::ostringstream os;
  os.precision(17);
  dump(game, os);
  return os.str();
}

}  // namespace posauc
