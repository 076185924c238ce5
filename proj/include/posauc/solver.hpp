#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "posauc/agg.hpp"
#include "posauc/mechanism_spec.hpp"
#include "posauc/mechanisms.hpp"
#include "posauc/metrics.hpp"
#include "posauc/model.hpp"

namespace posauc {

constexpr long long kDefaultProfileBudget = 50'000'000;

// Bids 0..ceil(max value) per agent, capped at k_max. Bids above an agent's
// value are dominated; nothing else is removed.
inline std::vector<std::vector<int>> prune_dominated(const Setting& setting, int k_max) {
  std::vector<std::vector<int>> allowed(agent_count(setting));
  for (int i = 0; i < agent_count(setting); ++i) {
    const double top = std::ceil(snap_integer(max_value(setting, i)));
    const int hi = top >= k_max ? k_max : static_cast<int>(top);
    for (int k = 0; k <= hi; ++k) allowed[i].push_back(k);
  }
  return allowed;
}

struct PsneResult {
  std::vector<Profile> equilibria;  // lexicographic, agent 0 most significant
  bool solved = true;
  long long profiles = 0;           // size of the profile space
};

namespace detail {

// Scans prefixes [begin, end) of agents 0..n-2; the last agent is resolved by
// its best-response set for each prefix.
inline void scan_prefixes(const ActionGraphGame& game, long long begin, long long end, std::vector<Profile>& found) {
  const int n = game.agent_count();
  DeviationEvaluator eval(game);
  std::vector<double> pay;
  Profile profile(n, 0);
  long long rem = begin;
  for (int a = n - 2; a >= 0; --a) {
    const long long size = static_cast<long long>(game.action_set(a).size());
    profile[a] = static_cast<int>(rem % size);
    rem /= size;
  }
  const int last = n - 1;
  for (long long idx = begin; idx < end; ++idx) {
    eval.payoffs(profile, last, {}, pay);
    const double best = *std::max_element(pay.begin(), pay.end());
    std::vector<int> responses;
    for (int b = 0; b < static_cast<int>(pay.size()); ++b)
      if (pay[b] >= best - kPayoffTolerance) responses.push_back(b);
    std::vector<double> other;
    for (int b : responses) {
      profile[last] = b;
      bool stable = true;
      for (int a = 0; a < last && stable; ++a) {
        eval.payoffs(profile, a, {}, other);
        const double top = *std::max_element(other.begin(), other.end());
        stable = top <= other[profile[a]] + kPayoffTolerance;
      }
      if (stable) found.push_back(profile);
    }
    profile[last] = 0;
    for (int a = n - 2; a >= 0; --a) {
      if (++profile[a] < static_cast<int>(game.action_set(a).size())) break;
      profile[a] = 0;
    }
  }
}

}  // namespace detail

// Every pure-strategy Nash equilibrium of the game, with a best-response
// tolerance of 1e-9. When the profile space exceeds `budget`, only a
// lexicographic prefix of it is scanned and solved is false.
inline PsneResult enumerate_psne(const ActionGraphGame& game, long long budget = kDefaultProfileBudget, int jobs = 1) {
  detail::require_finalized(game);
  PsneResult r;
  const int n = game.agent_count();
  if (n == 0) {
    r.equilibria.push_back({});
    r.profiles = 1;
    return r;
  }
  long double total = 1.0L;
  for (int a = 0; a < n; ++a) total *= static_cast<long double>(game.action_set(a).size());
  r.profiles = total > 9e18L ? static_cast<long long>(9e18L) : static_cast<long long>(total);
  const long long last_size = static_cast<long long>(game.action_set(n - 1).size());
  long long prefixes = 1;
  for (int a = 0; a + 1 < n; ++a) {
    const long long size = static_cast<long long>(game.action_set(a).size());
    prefixes = prefixes > budget ? prefixes : prefixes * size;
  }
  long long limit = prefixes;
  if (total > static_cast<long double>(budget)) {
    r.solved = false;
    limit = std::min(prefixes, budget / last_size);
  }
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<long long>(limit, 1 << 20))));
  if (jobs == 1) {
    detail::scan_prefixes(game, 0, limit, r.equilibria);
    return r;
  }
  std::vector<std::vector<Profile>> parts(jobs);
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t) {
    const long long b = limit * t / jobs, e = limit * (t + 1) / jobs;
    workers.emplace_back([&, t, b, e] { detail::scan_prefixes(game, b, e, parts[t]); });
  }
  for (auto& w : workers) w.join();
  for (auto& p : parts) r.equilibria.insert(r.equilibria.end(), p.begin(), p.end());
  return r;
}

enum class Selection { Min, Median, Max };

inline std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::Min: return "min";
    case Selection::Median: return "median";
    case Selection::Max: return "max";
  }
  return "?";
}

inline double select(std::vector<double> values, Selection criterion) {
  if (values.empty()) throw std::invalid_argument("no equilibria to select from");
  std::sort(values.begin(), values.end());
  switch (criterion) {
    case Selection::Min: return values.front();
    case Selection::Max: return values.back();
    case Selection::Median: return values[(values.size() - 1) / 2];
  }
  return values.front();
}

constexpr double kEnvyFreeTolerance = 1e-9;

// Equilibria (as bid vectors) whose total envy is zero.
inline std::vector<std::vector<int>> envy_free_filter(const std::vector<std::vector<int>>& equilibria,
                                                      const Setting& setting, const MechanismSpec& mech) {
  std::vector<std::vector<int>> kept;
  if (equilibria.empty()) return kept;
  const auto norm = Normalizers::of(setting);
  for (const auto& bids : equilibria) {
    const auto envy = total_envy(simulate_outcome(setting, mech, bids), setting, norm);
    if (!envy) throw std::invalid_argument("envy is undefined with externalities");
    if (*envy <= kEnvyFreeTolerance) kept.push_back(bids);
  }
  return kept;
}

struct EquilibriumSet {
  std::string game_id;
  std::vector<std::vector<int>> equilibria;  // bid vectors
  bool solved = true;
  std::vector<MetricVector> metrics;         // aligned with equilibria

  std::vector<double> values(MetricKind k) const {
    std::vector<double> out;
    for (const auto& m : metrics) out.push_back(m.get(k));
    return out;
  }
};

}  // namespace posauc
