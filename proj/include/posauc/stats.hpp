#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace posauc {

// SplitMix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(master) ^ a) ^ b);
}

constexpr int kDefaultResamples = 20000;

struct BootstrapResult {
  double mean_of_means = 0.0;
  std::map<double, double> quantiles;  // alpha -> alpha-quantile of resampled means
  int resamples = 0;
  std::set<double> significant_at;

  bool significant(double alpha) const { return significant_at.count(alpha) > 0; }
};

// Order statistic at index ceil(alpha * R) (1-based) of ascending values.
inline double lower_quantile(const std::vector<double>& sorted, double alpha) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = std::ceil(alpha * static_cast<double>(sorted.size()) - 1e-12);
  const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(sorted.size()))) - 1;
  return sorted[idx];
}

// Means-of-means bootstrap over per-instance differences. A level alpha is
// significant when the alpha-quantile of the resampled means is >= 0.
inline BootstrapResult bootstrap_compare(const std::vector<double>& diffs, const std::vector<double>& alphas,
                                         int resamples = kDefaultResamples, std::uint64_t seed = 0) {
  if (diffs.empty()) throw std::invalid_argument("bootstrap needs at least one difference");
  if (resamples < 1) throw std::invalid_argument("bootstrap needs at least one resample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, diffs.size() - 1);
  std::vector<double> means(resamples);
  long double grand = 0.0L;
  for (int r = 0; r < resamples; ++r) {
    long double sum = 0.0L;
    for (std::size_t t = 0; t < diffs.size(); ++t) sum += diffs[pick(rng)];
    means[r] = static_cast<double>(sum / static_cast<long double>(diffs.size()));
    grand += means[r];
  }
  BootstrapResult out;
  out.resamples = resamples;
  out.mean_of_means = static_cast<double>(grand / resamples);
  std::sort(means.begin(), means.end());
  for (double a : alphas) {
    const double q = lower_quantile(means, a);
    out.quantiles[a] = q;
    if (q >= 0.0) out.significant_at.insert(a);
  }
  return out;
}

inline double bonferroni(double alpha, int num_tests) {
  if (num_tests < 1) throw std::invalid_argument("Bonferroni needs at least one test");
  return alpha / num_tests;
}

// Per-instance min/median/max of a metric over equilibria. Unsolved instances
// carry an interval: lo is the value used when the instance is credited
// least, hi when credited most.
struct SelectionSummary {
  std::array<double, 3> lo{};  // min, median, max
  std::array<double, 3> hi{};

  static SelectionSummary exact(double mn, double md, double mx) { return {{mn, md, mx}, {mn, md, mx}}; }
  static SelectionSummary interval(double lower, double upper) {
    return {{lower, lower, lower}, {upper, upper, upper}};
  }
  bool exact_values() const { return lo == hi; }
};

enum class RelationKind { RobustlySuperior, SuperiorUpToSelection, Spans, Incomparable };

struct PairRelation {
  RelationKind relation = RelationKind::Incomparable;
  int direction = 0;  // +1: A above / A spans B; -1: A below / A inside B
  int stars = 0;      // 1: alpha 0.05, 2: alpha 0.01, after correction

  std::string symbol() const {
    std::string s;
    switch (relation) {
      case RelationKind::RobustlySuperior: s = direction > 0 ? "≥†" : "≤†"; break;
      case RelationKind::SuperiorUpToSelection: s = direction > 0 ? "≥" : "≤"; break;
      case RelationKind::Spans: s = direction > 0 ? "⊇" : "⊆"; break;
      case RelationKind::Incomparable: return "∼";
    }
    return s + std::string(static_cast<std::size_t>(stars), '*');
  }
  std::string kind_name() const {
    switch (relation) {
      case RelationKind::RobustlySuperior: return "dagger";
      case RelationKind::SuperiorUpToSelection: return "selection";
      case RelationKind::Spans: return "spans";
      case RelationKind::Incomparable: return "incomparable";
    }
    return "?";
  }
  bool operator==(const PairRelation&) const = default;
};

struct ClassifyOptions {
  int num_tests = 1;
  int resamples = kDefaultResamples;
  std::uint64_t seed = 0;
};

namespace detail {

enum Sel { kMin = 0, kMed = 1, kMax = 2 };

// Stars (0, 1 or 2) with which "x significantly exceeds y" holds, using x's
// lower bounds against y's upper bounds.
inline int greater_stars(const std::vector<SelectionSummary>& x, int xs, const std::vector<SelectionSummary>& y, int ys,
                         const ClassifyOptions& opt) {
  std::vector<double> diffs(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) diffs[t] = x[t].lo[xs] - y[t].hi[ys];
  const double a1 = bonferroni(0.05, opt.num_tests), a2 = bonferroni(0.01, opt.num_tests);
  const auto r = bootstrap_compare(diffs, {a1, a2}, opt.resamples, opt.seed);
  if (!(r.mean_of_means > 0.0)) return 0;
  if (r.significant(a2)) return 2;
  if (r.significant(a1)) return 1;
  return 0;
}

inline int all_stars(std::initializer_list<int> parts) {
  int s = 2;
  for (int p : parts) s = std::min(s, p);
  return s;
}

}  // namespace detail

inline PairRelation classify_pair(const std::vector<SelectionSummary>& a, const std::vector<SelectionSummary>& b,
                                  const ClassifyOptions& opt = {}) {
  using namespace detail;
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("classify_pair needs aligned, nonempty blocks");
  // Robust superiority: one side's worst case beats the other's best case.
  if (const int s = greater_stars(a, kMin, b, kMax, opt); s > 0) return {RelationKind::RobustlySuperior, +1, s};
  if (const int s = greater_stars(b, kMin, a, kMax, opt); s > 0) return {RelationKind::RobustlySuperior, -1, s};
  const int a_best = greater_stars(a, kMax, b, kMax, opt);
  const int a_med = greater_stars(a, kMed, b, kMed, opt);
  const int a_worst = greater_stars(a, kMin, b, kMin, opt);
  const int b_best = greater_stars(b, kMax, a, kMax, opt);
  const int b_med = greater_stars(b, kMed, a, kMed, opt);
  const int b_worst = greater_stars(b, kMin, a, kMin, opt);
  if (const int s = all_stars({a_best, a_med, a_worst}); s > 0) return {RelationKind::SuperiorUpToSelection, +1, s};
  if (const int s = all_stars({b_best, b_med, b_worst}); s > 0) return {RelationKind::SuperiorUpToSelection, -1, s};
  // Spans: A's range strictly contains B's on both ends, or vice versa.
  if (const int s = all_stars({a_best, b_worst}); s > 0) return {RelationKind::Spans, +1, s};
  if (const int s = all_stars({b_best, a_worst}); s > 0) return {RelationKind::Spans, -1, s};
  return {};
}

}  // namespace posauc
