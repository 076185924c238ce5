#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "posauc/mechanisms.hpp"
#include "posauc/model.hpp"

namespace posauc {

enum class MetricKind { Efficiency, Revenue, Relevance, Envy };

inline constexpr std::array<MetricKind, 4> kAllMetrics{MetricKind::Efficiency, MetricKind::Revenue,
                                                       MetricKind::Relevance, MetricKind::Envy};

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Efficiency: return "efficiency";
    case MetricKind::Revenue: return "revenue";
    case MetricKind::Relevance: return "relevance";
    case MetricKind::Envy: return "envy";
  }
  return "?";
}

inline MetricKind parse_metric(std::string_view s) {
  for (MetricKind k : kAllMetrics)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown metric: " + std::string(s));
}

struct MetricVector {
  double efficiency = 0.0;
  double revenue = 0.0;
  double relevance = 0.0;
  double envy = 0.0;
  bool envy_defined = false;

  double get(MetricKind k) const {
    switch (k) {
      case MetricKind::Efficiency: return efficiency;
      case MetricKind::Revenue: return revenue;
      case MetricKind::Relevance: return relevance;
      case MetricKind::Envy: return envy;
    }
    return 0.0;
  }
};

// Per-instance normalizers.
struct Normalizers {
  double max_welfare = 0.0;
  double max_clicks = 0.0;

  static Normalizers of(const Setting& s) { return {posauc::max_welfare(s).welfare, posauc::max_clicks(s)}; }
};

// Sum over ordered pairs of i's positive gain from taking j's allocation
// lottery at j's per-click prices, before normalization.
inline std::optional<double> raw_total_envy(const Outcome& o, const Setting& setting) {
  const auto* s = std::get_if<AuctionSetting>(&setting);
  if (!s) return std::nullopt;
  double total = 0.0;
  for (int i = 0; i < s->n; ++i)
    for (int j = 0; j < s->n; ++j) {
      if (i == j) continue;
      double swap = 0.0;
      for (const auto& p : o.placements[j])
        if (p.position >= 0) swap += p.probability * s->clicks[i][p.position] * (s->values[i][p.position] - p.price);
      total += std::max(0.0, swap - o.expected_utility[i]);
    }
  return total;
}

inline std::optional<double> total_envy(const Outcome& o, const Setting& setting, const Normalizers& norm) {
  const auto raw = raw_total_envy(o, setting);
  if (!raw) return std::nullopt;
  if (!(norm.max_welfare > 0.0)) throw std::domain_error("envy needs positive achievable welfare");
  return *raw / norm.max_welfare;
}

inline std::optional<double> total_envy(const Outcome& o, const Setting& setting) {
  return total_envy(o, setting, Normalizers::of(setting));
}

inline MetricVector metric_vector(const Outcome& o, const Setting& setting, const Normalizers& norm) {
  if (!(norm.max_welfare > 0.0) || !(norm.max_clicks > 0.0))
    throw std::domain_error("metrics need positive achievable welfare and clicks");
  MetricVector mv;
  mv.efficiency = o.welfare / norm.max_welfare;
  mv.revenue = o.revenue / norm.max_welfare;
  mv.relevance = o.expected_clicks / norm.max_clicks;
  if (const auto envy = total_envy(o, setting, norm)) {
    mv.envy = *envy;
    mv.envy_defined = true;
  }
  return mv;
}

inline MetricVector metric_vector(const Outcome& o, const Setting& setting) {
  return metric_vector(o, setting, Normalizers::of(setting));
}

// Interval guaranteed to contain the metric of any equilibrium.
inline std::pair<double, double> bounds_for_unsolved(MetricKind kind, const Setting& setting, const Normalizers& norm) {
  switch (kind) {
    case MetricKind::Efficiency:
    case MetricKind::Revenue:
    case MetricKind::Relevance: return {0.0, 1.0};
    case MetricKind::Envy: {
      const auto* s = std::get_if<AuctionSetting>(&setting);
      if (!s || s->n < 2) return {0.0, 0.0};
      // Equilibrium utilities are nonnegative, so no swap is worth more than
      // the best click value on offer.
      double bound = 0.0;
      for (int i = 0; i < s->n; ++i) {
        double best = 0.0;
        for (int j = 0; j < s->n; ++j) best = std::max(best, s->clicks[i][j] * s->values[i][j]);
        bound += (s->n - 1) * best;
      }
      return {0.0, bound / norm.max_welfare};
    }
  }
  return {0.0, 1.0};
}

inline std::pair<double, double> bounds_for_unsolved(MetricKind kind, const Setting& setting) {
  return bounds_for_unsolved(kind, setting, Normalizers::of(setting));
}

}  // namespace posauc
