#pragma once

// Per-mechanism worst/median/best means and standard deviations from the
// published V-LN comparison tables, and a generator of blocked synthetic
// per-instance data that matches them.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "posauc/stats.hpp"

namespace vln {

struct Row {
  std::array<double, 3> mean;  // worst, median, best
  std::array<double, 3> sd;
};

using Table = std::map<std::string, Row>;

inline const Table kEfficiency = {
    {"GFP", {{0.921, 0.922, 0.922}, {0.059, 0.059, 0.059}}},
    {"uGSP", {{0.810, 0.941, 0.993}, {0.157, 0.092, 0.033}}},
    {"wGSP", {{0.938, 0.997, 1.000}, {0.056, 0.005, 0.000}}},
    {"wGFP", {{0.970, 0.970, 0.970}, {0.012, 0.012, 0.012}}},
    {"VCG", {{1.000, 1.000, 1.000}, {0.000, 0.000, 0.000}}},
    {"dVCG", {{1.000, 1.000, 1.000}, {0.001, 0.001, 0.001}}},
};

inline const Table kRevenue = {
    {"GFP", {{0.333, 0.333, 0.333}, {0.076, 0.076, 0.076}}},
    {"uGSP", {{0.190, 0.362, 0.558}, {0.054, 0.079, 0.128}}},
    {"wGSP", {{0.172, 0.328, 0.489}, {0.074, 0.096, 0.138}}},
    {"wGFP", {{0.302, 0.302, 0.302}, {0.107, 0.107, 0.107}}},
    {"VCG", {{0.351, 0.351, 0.351}, {0.126, 0.126, 0.126}}},
    {"dVCG", {{0.351, 0.351, 0.351}, {0.126, 0.126, 0.126}}},
};

// Instance t shares a latent draw across mechanisms (seeded by t only), so
// blocks for different mechanisms are correlated the way per-instance results
// on common instances are. `seed` drives the mechanism-specific noise.
inline std::vector<posauc::SelectionSummary> block(const Table& table, const std::string& mech, int instances,
                                                   std::uint64_t seed, double rho = 0.9) {
  const Row& row = table.at(mech);
  std::vector<posauc::SelectionSummary> out;
  std::normal_distribution<double> normal;
  std::mt19937_64 own(seed);
  for (int t = 0; t < instances; ++t) {
    std::mt19937_64 shared(1000003ULL * static_cast<std::uint64_t>(t) + 17);
    const double z = normal(shared);
    const double e = normal(own);
    std::array<double, 3> v{};
    for (int s = 0; s < 3; ++s)
      v[s] = std::clamp(row.mean[s] + row.sd[s] * (rho * z + std::sqrt(1.0 - rho * rho) * e), 0.0, 1.0);
    std::sort(v.begin(), v.end());
    out.push_back(posauc::SelectionSummary::exact(v[0], v[1], v[2]));
  }
  return out;
}

}  // namespace vln
