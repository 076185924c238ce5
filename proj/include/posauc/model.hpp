#pragma once

// Position-auction preference models and instance samplers.
//
// Two setting shapes are supported:
//   AuctionSetting  no-externality models (EOS, V, BHN, BSS): per-agent,
//                   per-position value-per-click and click-probability rows.
//   GimSetting      externality models (Cascade, Hybrid, GIM): a scalar value
//                   per click and a set function f_i over the ads shown above.
//
// Positions are 0-based in code. Matrices always carry n position columns;
// columns at or beyond the slot count m have zero click probability.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace posauc {

using Rng = std::mt19937_64;

enum class ModelKind { EOS, V, BHN, BSS, Cascade, Hybrid, GIM };
enum class ValueLaw { UNI, LN };

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::EOS: return "EOS";
    case ModelKind::V: return "V";
    case ModelKind::BHN: return "BHN";
    case ModelKind::BSS: return "BSS";
    case ModelKind::Cascade: return "Cascade";
    case ModelKind::Hybrid: return "Hybrid";
    case ModelKind::GIM: return "GIM";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::EOS, ModelKind::V, ModelKind::BHN, ModelKind::BSS,
                 ModelKind::Cascade, ModelKind::Hybrid, ModelKind::GIM}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown model kind: " + std::string(s));
}

inline bool has_externalities(ModelKind kind) {
  return kind == ModelKind::Cascade || kind == ModelKind::Hybrid || kind == ModelKind::GIM;
}

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSettingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuctionSetting {
  int n = 0;
  int m = 0;
  std::vector<std::vector<double>> values;  // [agent][position], money per click
  std::vector<std::vector<double>> clicks;  // [agent][position], probability
  std::vector<double> qualities;            // top-position click probability
  ModelKind model_kind = ModelKind::EOS;

  int positions() const { return n; }

  // Largest per-click value of an agent across the positions that can be clicked.
  double max_value(int agent) const {
    double best = 0.0;
    for (int j = 0; j < n; ++j) best = std::max(best, values[agent][j]);
    return best;
  }

  bool operator==(const AuctionSetting&) const = default;
};

struct GimSetting {
  int n = 0;
  int m = 0;
  std::vector<double> values;     // money per click
  std::vector<double> qualities;  // top-position click probability
  // externality[i] is indexed by a compressed bitmask over the agents other
  // than i (bit t stands for the t-th other agent in ascending order).
  std::vector<std::vector<double>> externality;
  std::vector<double> continuation;  // empty for GIM
  ModelKind model_kind = ModelKind::Cascade;

  static std::uint32_t compress(int agent, std::uint32_t full_mask) {
    const std::uint32_t low = full_mask & ((1u << agent) - 1u);
    const std::uint32_t high = full_mask >> (agent + 1);
    return low | (high << agent);
  }

  static std::uint32_t expand(int agent, std::uint32_t compressed) {
    const std::uint32_t low = compressed & ((1u << agent) - 1u);
    const std::uint32_t high = compressed >> agent;
    return low | (high << (agent + 1));
  }

  // f_i(S) with S given as a bitmask over all agents; bit i is ignored.
  double f(int agent, std::uint32_t full_mask) const {
    full_mask &= ~(1u << agent);
    return externality[agent][compress(agent, full_mask)];
  }

  bool has_continuation() const { return !continuation.empty(); }

  bool operator==(const GimSetting&) const = default;
};

using Setting = std::variant<AuctionSetting, GimSetting>;

inline int agent_count(const Setting& s) {
  return std::visit([](const auto& x) { return x.n; }, s);
}
inline int slot_count(const Setting& s) {
  return std::visit([](const auto& x) { return x.m; }, s);
}
inline ModelKind model_kind(const Setting& s) {
  return std::visit([](const auto& x) { return x.model_kind; }, s);
}
inline const std::vector<double>& qualities(const Setting& s) {
  return std::visit([](const auto& x) -> const std::vector<double>& { return x.qualities; }, s);
}

// Largest per-click value agent i holds for any position.
inline double max_value(const Setting& s, int agent) {
  if (const auto* a = std::get_if<AuctionSetting>(&s)) return a->max_value(agent);
  return std::get<GimSetting>(s).values[agent];
}

// ---------------------------------------------------------------------------
// Distributions

struct LogNormalParams {
  double location = 0.0;
  double scale = 1.0;
  bool operator==(const LogNormalParams&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Range&) const = default;
};

struct DistributionSpec {
  ModelKind model_kind = ModelKind::V;
  ValueLaw value_law = ValueLaw::UNI;
  LogNormalParams ln_value;
  LogNormalParams ln_quality;
  Range value_range{0.0, 1.0};          // uniform on (lo, hi]
  Range quality_range{0.0, 1.0};        // uniform on (lo, hi]
  Range position_factor_range{0.0, 1.0};
  Range continuation_range{0.0, 0.95};  // uniform on [lo, hi]
  Range gim_pair_range{0.2, 1.0};
  Range bss_decay_range{0.3, 0.9};
  std::uint64_t seed = 0;
  int max_attempts = 1000;

  bool operator==(const DistributionSpec&) const = default;
};

// Family names as used in the experiment tables, e.g. "V-LN", "CAS-UNI", "BSS".
inline std::string family_name(const DistributionSpec& spec) {
  std::string base;
  switch (spec.model_kind) {
    case ModelKind::BSS: return "BSS";
    case ModelKind::Cascade: base = "CAS"; break;
    case ModelKind::Hybrid: base = "HYB"; break;
    default: base = std::string(to_string(spec.model_kind)); break;
  }
  return base + (spec.value_law == ValueLaw::LN ? "-LN" : "-UNI");
}

inline DistributionSpec parse_family(std::string_view name) {
  DistributionSpec spec;
  if (name == "BSS") {
    spec.model_kind = ModelKind::BSS;
    return spec;
  }
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) throw std::invalid_argument("unknown distribution: " + std::string(name));
  const auto base = name.substr(0, dash);
  const auto law = name.substr(dash + 1);
  if (law == "UNI") {
    spec.value_law = ValueLaw::UNI;
  } else if (law == "LN") {
    spec.value_law = ValueLaw::LN;
  } else {
    throw std::invalid_argument("unknown value law in " + std::string(name));
  }
  if (base == "EOS") spec.model_kind = ModelKind::EOS;
  else if (base == "V") spec.model_kind = ModelKind::V;
  else if (base == "BHN") spec.model_kind = ModelKind::BHN;
  else if (base == "CAS" || base == "Cascade") spec.model_kind = ModelKind::Cascade;
  else if (base == "HYB" || base == "Hybrid") spec.model_kind = ModelKind::Hybrid;
  else if (base == "GIM") spec.model_kind = ModelKind::GIM;
  else throw std::invalid_argument("unknown distribution: " + std::string(name));
  return spec;
}

inline const std::vector<std::string>& all_families() {
  static const std::vector<std::string> names = {
      "EOS-UNI", "EOS-LN", "V-UNI", "V-LN", "BHN-UNI", "BHN-LN", "BSS",
      "CAS-UNI", "CAS-LN", "HYB-UNI", "HYB-LN", "GIM-UNI", "GIM-LN"};
  return names;
}

inline void check_spec(const DistributionSpec& spec) {
  auto bad = [](const std::string& what) { throw std::invalid_argument("invalid distribution: " + what); };
  if (!(spec.ln_value.scale > 0.0) || !(spec.ln_quality.scale > 0.0)) bad("log-normal scale must be positive");
  auto in_unit = [&](const Range& r, const char* name, bool allow_one) {
    if (!(r.lo < r.hi) || r.lo < 0.0 || r.hi > 1.0 || (!allow_one && r.hi >= 1.0)) bad(name);
  };
  if (!(spec.value_range.lo < spec.value_range.hi) || spec.value_range.lo < 0.0) bad("value range");
  in_unit(spec.quality_range, "quality range", true);
  in_unit(spec.position_factor_range, "position factor range", true);
  in_unit(spec.continuation_range, "continuation range", false);
  if (!(spec.gim_pair_range.lo < spec.gim_pair_range.hi) || spec.gim_pair_range.lo <= 0.0 ||
      spec.gim_pair_range.hi > 1.0)
    bad("gim pair range");
  if (!(spec.bss_decay_range.lo < spec.bss_decay_range.hi) || spec.bss_decay_range.lo <= 0.0 ||
      spec.bss_decay_range.hi >= 1.0)
    bad("bss decay range");
  if (spec.max_attempts < 1) bad("max_attempts");
}

namespace detail {

// Uniform on (lo, hi].
inline double uniform_open_closed(Rng& rng, const Range& r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return r.hi - (r.hi - r.lo) * u(rng);
}

inline double uniform_closed(Rng& rng, const Range& r) {
  std::uniform_real_distribution<double> u(r.lo, r.hi);
  return u(rng);
}

inline double lognormal(Rng& rng, const LogNormalParams& p) {
  std::lognormal_distribution<double> d(p.location, p.scale);
  return d(rng);
}

inline double draw_value(Rng& rng, const DistributionSpec& spec) {
  return spec.value_law == ValueLaw::LN ? lognormal(rng, spec.ln_value) : uniform_open_closed(rng, spec.value_range);
}

// Qualities live in (0, 1]. Log-normal draws are divided by their maximum so
// that relative qualities follow the law and the best ad has q = 1.
inline std::vector<double> draw_qualities(Rng& rng, const DistributionSpec& spec, int n) {
  std::vector<double> q(n);
  if (spec.value_law == ValueLaw::LN) {
    for (auto& x : q) x = lognormal(rng, spec.ln_quality);
    const double top = *std::max_element(q.begin(), q.end());
    for (auto& x : q) x /= top;
  } else {
    for (auto& x : q) x = uniform_open_closed(rng, spec.quality_range);
  }
  return q;
}

// Decreasing position factors with factor[0] = 1.
inline std::vector<double> draw_position_factors(Rng& rng, const DistributionSpec& spec, int count) {
  std::vector<double> alpha(count, 1.0);
  for (int j = 1; j < count; ++j) alpha[j] = uniform_open_closed(rng, spec.position_factor_range);
  std::sort(alpha.begin() + 1, alpha.end(), std::greater<>());
  return alpha;
}

inline AuctionSetting empty_auction(int n, int m, ModelKind kind) {
  AuctionSetting s;
  s.n = n;
  s.m = m;
  s.model_kind = kind;
  s.values.assign(n, std::vector<double>(n, 0.0));
  s.clicks.assign(n, std::vector<double>(n, 0.0));
  s.qualities.assign(n, 0.0);
  return s;
}

inline AuctionSetting sample_no_externality(const DistributionSpec& spec, int n, int m, Rng& rng) {
  AuctionSetting s = empty_auction(n, m, spec.model_kind);
  const int slots = std::min(n, m);
  switch (spec.model_kind) {
    case ModelKind::EOS:
    case ModelKind::V: {
      const auto alpha = draw_position_factors(rng, spec, n);
      std::vector<double> q;
      if (spec.model_kind == ModelKind::EOS) {
        q.assign(n, draw_qualities(rng, spec, 1)[0]);
      } else {
        q = draw_qualities(rng, spec, n);
      }
      for (int i = 0; i < n; ++i) {
        const double v = draw_value(rng, spec);
        s.qualities[i] = q[i];
        for (int j = 0; j < n; ++j) {
          s.values[i][j] = v;
          s.clicks[i][j] = j < slots ? alpha[j] * q[i] : 0.0;
        }
      }
      break;
    }
    case ModelKind::BHN: {
      const auto alpha = draw_position_factors(rng, spec, n);
      const auto q = draw_qualities(rng, spec, n);
      for (int i = 0; i < n; ++i) {
        s.qualities[i] = q[i];
        std::vector<double> per_impression(slots);
        for (auto& w : per_impression) w = draw_value(rng, spec);
        std::sort(per_impression.begin(), per_impression.end(), std::greater<>());
        for (int j = 0; j < n; ++j) {
          if (j < slots) {
            s.clicks[i][j] = alpha[j] * q[i];
            s.values[i][j] = per_impression[j] / s.clicks[i][j];
            if (j > 0) s.values[i][j] = std::max(s.values[i][j], s.values[i][j - 1]);
          } else {
            s.values[i][j] = s.values[i][j - 1];
          }
        }
      }
      break;
    }
    case ModelKind::BSS: {
      const auto alpha = draw_position_factors(rng, spec, n);
      const double q = uniform_open_closed(rng, spec.quality_range);
      std::uniform_int_distribution<int> peak_pos(0, slots - 1);
      for (int i = 0; i < n; ++i) {
        s.qualities[i] = q;
        for (int j = 0; j < n; ++j) s.clicks[i][j] = j < slots ? alpha[j] * q : 0.0;
        const int peak = peak_pos(rng);
        s.values[i][peak] = draw_value(rng, spec);
        for (int j = peak - 1; j >= 0; --j)
          s.values[i][j] = s.values[i][j + 1] * uniform_closed(rng, spec.bss_decay_range);
        for (int j = peak + 1; j < n; ++j)
          s.values[i][j] = s.values[i][j - 1] * uniform_closed(rng, spec.bss_decay_range);
      }
      break;
    }
    default:
      throw std::logic_error("not a no-externality model");
  }
  return s;
}

inline GimSetting sample_externality(const DistributionSpec& spec, int n, int m, Rng& rng) {
  GimSetting s;
  s.n = n;
  s.m = m;
  s.model_kind = spec.model_kind;
  s.qualities = draw_qualities(rng, spec, n);
  s.values.resize(n);
  for (auto& v : s.values) v = draw_value(rng, spec);
  const std::uint32_t subsets = 1u << (n - 1);
  s.externality.assign(n, std::vector<double>(subsets, 1.0));

  std::vector<double> delta;
  std::vector<std::vector<double>> pair;  // pair[j][i]: factor j imposes on i
  if (spec.model_kind == ModelKind::GIM) {
    pair.assign(n, std::vector<double>(n, 1.0));
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j) pair[j][i] = uniform_closed(rng, spec.gim_pair_range);
  } else {
    s.continuation.resize(n);
    for (auto& c : s.continuation) c = uniform_closed(rng, spec.continuation_range);
    if (spec.model_kind == ModelKind::Hybrid) delta = draw_position_factors(rng, spec, n);
  }

  for (int i = 0; i < n; ++i) {
    for (std::uint32_t c = 0; c < subsets; ++c) {
      const std::uint32_t full = GimSetting::expand(i, c);
      double f = 1.0;
      int size = 0;
      for (int j = 0; j < n; ++j) {
        if (!(full >> j & 1u)) continue;
        ++size;
        f *= spec.model_kind == ModelKind::GIM ? pair[j][i] : s.continuation[j];
      }
      if (spec.model_kind == ModelKind::Hybrid) f *= delta[size];
      s.externality[i][c] = f;
    }
  }
  return s;
}

}  // namespace detail

std::vector<std::string> validate_setting(const Setting& setting);

// Draws one instance. The result is a pure function of (spec, n, m, rng state).
inline Setting sample_setting(const DistributionSpec& spec, int n, int m, Rng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("sample_setting needs n >= 1 and m >= 1");
  if (has_externalities(spec.model_kind) && n > 20) throw std::invalid_argument("externality settings support n <= 20");
  check_spec(spec);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Setting s = has_externalities(spec.model_kind) ? Setting(detail::sample_externality(spec, n, m, rng))
                                                   : Setting(detail::sample_no_externality(spec, n, m, rng));
    if (validate_setting(s).empty()) return s;
  }
  throw SamplingError("no valid " + family_name(spec) + " instance after " + std::to_string(spec.max_attempts) +
                      " attempts");
}

inline Setting sample_setting(const DistributionSpec& spec, int n, int m) {
  Rng rng(spec.seed);
  return sample_setting(spec, n, m, rng);
}

// Scales every value by one positive constant so the largest equals k_max.
inline Setting normalize_setting(Setting setting, double k_max) {
  double top = 0.0;
  for (int i = 0; i < agent_count(setting); ++i) top = std::max(top, max_value(setting, i));
  if (!(top > 0.0)) throw DegenerateSettingError("all values are zero");
  if (top == k_max) return setting;
  const double scale = k_max / top;
  if (auto* a = std::get_if<AuctionSetting>(&setting)) {
    for (auto& row : a->values)
      for (auto& v : row) v = v == top ? k_max : v * scale;
  } else {
    for (auto& v : std::get<GimSetting>(setting).values) v = v == top ? k_max : v * scale;
  }
  return setting;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

constexpr double kModelTol = 1e-9;

inline std::string idx(int i) { return std::to_string(i); }

inline void validate_auction(const AuctionSetting& s, std::vector<std::string>& out) {
  const int n = s.n;
  if (n < 1 || s.m < 1) {
    out.push_back("shape: n and m must be positive");
    return;
  }
  if (static_cast<int>(s.values.size()) != n || static_cast<int>(s.clicks.size()) != n ||
      static_cast<int>(s.qualities.size()) != n) {
    out.push_back("shape: expected " + idx(n) + " rows");
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(s.values[i].size()) != n || static_cast<int>(s.clicks[i].size()) != n) {
      out.push_back("shape: agent " + idx(i) + " needs " + idx(n) + " position columns");
      return;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!(s.qualities[i] > 0.0 && s.qualities[i] <= 1.0)) out.push_back("quality range: agent " + idx(i));
    for (int j = 0; j < n; ++j) {
      if (!(s.values[i][j] >= 0.0) || !std::isfinite(s.values[i][j]))
        out.push_back("value range: agent " + idx(i) + " position " + idx(j));
      if (!(s.clicks[i][j] >= 0.0 && s.clicks[i][j] <= 1.0))
        out.push_back("click range: agent " + idx(i) + " position " + idx(j));
      if (j >= s.m && s.clicks[i][j] != 0.0)
        out.push_back("slot limit: agent " + idx(i) + " position " + idx(j) + " has clicks beyond m");
      if (j > 0 && s.clicks[i][j] > s.clicks[i][j - 1] + kModelTol)
        out.push_back("click monotonicity: agent " + idx(i) + " positions " + idx(j - 1) + "," + idx(j));
    }
  }
  const int slots = std::min(n, s.m);
  switch (s.model_kind) {
    case ModelKind::EOS:
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (std::abs(s.clicks[i][j] - s.clicks[0][j]) > kModelTol)
            out.push_back("EOS common clicks: agents 0," + idx(i) + " position " + idx(j));
      [[fallthrough]];
    case ModelKind::V:
      for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j)
          if (std::abs(s.values[i][j] - s.values[i][0]) > kModelTol * std::max(1.0, s.values[i][0]))
            out.push_back("position-independent value: agent " + idx(i) + " position " + idx(j));
      for (int i = 0; i < n; ++i)
        for (int i2 = i + 1; i2 < n; ++i2)
          for (int j = 0; j < n; ++j)
            for (int j2 = j + 1; j2 < n; ++j2)
              if (std::abs(s.clicks[i][j] * s.clicks[i2][j2] - s.clicks[i][j2] * s.clicks[i2][j]) > kModelTol)
                out.push_back("separability: agents " + idx(i) + "," + idx(i2) + " positions " + idx(j) + "," +
                              idx(j2));
      break;
    case ModelKind::BHN:
      for (int i = 0; i < n; ++i)
        for (int j = 1; j < slots; ++j) {
          if (s.values[i][j] < s.values[i][j - 1] - kModelTol * std::max(1.0, s.values[i][j - 1]))
            out.push_back("value monotonicity: agent " + idx(i) + " positions " + idx(j - 1) + "," + idx(j));
          const double before = s.clicks[i][j - 1] * s.values[i][j - 1];
          const double after = s.clicks[i][j] * s.values[i][j];
          if (after > before + kModelTol * std::max(1.0, before))
            out.push_back("per-impression monotonicity: agent " + idx(i) + " positions " + idx(j - 1) + "," +
                          idx(j));
        }
      for (int i = 0; i < n; ++i)
        for (int i2 = i + 1; i2 < n; ++i2)
          for (int j = 0; j < n; ++j)
            for (int j2 = j + 1; j2 < n; ++j2)
              if (std::abs(s.clicks[i][j] * s.clicks[i2][j2] - s.clicks[i][j2] * s.clicks[i2][j]) > kModelTol)
                out.push_back("separability: agents " + idx(i) + "," + idx(i2) + " positions " + idx(j) + "," +
                              idx(j2));
      break;
    case ModelKind::BSS:
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (std::abs(s.clicks[i][j] - s.clicks[0][j]) > kModelTol)
            out.push_back("BSS common clicks: agents 0," + idx(i) + " position " + idx(j));
      for (int i = 0; i < n; ++i) {
        const auto& v = s.values[i];
        const int peak = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
        for (int j = 0; j < n; ++j) {
          const bool ok = (j < peak && v[j] < v[j + 1]) || (j > peak && v[j] < v[j - 1]) || j == peak;
          if (!ok) out.push_back("single-peaked values: agent " + idx(i) + " position " + idx(j));
        }
      }
      break;
    default:
      out.push_back("model kind: " + std::string(to_string(s.model_kind)) + " is not a no-externality model");
  }
}

inline void validate_gim(const GimSetting& s, std::vector<std::string>& out) {
  const int n = s.n;
  if (n < 1 || s.m < 1 || n > 20) {
    out.push_back("shape: n must be in [1,20] and m positive");
    return;
  }
  const std::uint32_t subsets = 1u << (n - 1);
  if (static_cast<int>(s.values.size()) != n || static_cast<int>(s.qualities.size()) != n ||
      static_cast<int>(s.externality.size()) != n) {
    out.push_back("shape: expected " + idx(n) + " agents");
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (s.externality[i].size() != subsets) {
      out.push_back("shape: agent " + idx(i) + " externality table size");
      return;
    }
  }
  if (!has_externalities(s.model_kind))
    out.push_back("model kind: " + std::string(to_string(s.model_kind)) + " is not an externality model");
  for (int i = 0; i < n; ++i) {
    if (!(s.qualities[i] > 0.0 && s.qualities[i] <= 1.0)) out.push_back("quality range: agent " + idx(i));
    if (!(s.values[i] >= 0.0) || !std::isfinite(s.values[i])) out.push_back("value range: agent " + idx(i));
    if (s.externality[i][0] != 1.0) out.push_back("normalization: f[" + idx(i) + "](empty) != 1");
    for (std::uint32_t c = 0; c < subsets; ++c) {
      const double f = s.externality[i][c];
      if (!(f >= 0.0 && f <= 1.0)) out.push_back("normalization: f[" + idx(i) + "] outside [0,1] at subset " +
                                                   std::to_string(GimSetting::expand(i, c)));
      for (int t = 0; t < n - 1; ++t) {
        if (c >> t & 1u) continue;
        if (s.externality[i][c | (1u << t)] > f + kModelTol)
          out.push_back("monotonicity: f[" + idx(i) + "] increases when adding agent " +
                        std::to_string(t < i ? t : t + 1) + " to subset " + std::to_string(GimSetting::expand(i, c)));
      }
    }
  }
  const bool needs_cont = s.model_kind == ModelKind::Cascade || s.model_kind == ModelKind::Hybrid;
  if (needs_cont && static_cast<int>(s.continuation.size()) != n) {
    out.push_back("continuation: required for " + std::string(to_string(s.model_kind)));
    return;
  }
  for (int i = 0; i < static_cast<int>(s.continuation.size()); ++i)
    if (!(s.continuation[i] >= 0.0 && s.continuation[i] < 1.0)) out.push_back("continuation range: agent " + idx(i));
  if (s.model_kind == ModelKind::Cascade) {
    for (int i = 0; i < n; ++i)
      for (std::uint32_t c = 0; c < subsets; ++c) {
        const std::uint32_t full = GimSetting::expand(i, c);
        double expect = 1.0;
        for (int j = 0; j < n; ++j)
          if (full >> j & 1u) expect *= s.continuation[j];
        if (std::abs(expect - s.externality[i][c]) > kModelTol)
          out.push_back("cascade product: f[" + idx(i) + "] at subset " + std::to_string(full));
      }
  }
  if (s.model_kind == ModelKind::Hybrid) {
    // f_i(S) / prod cont must depend on |S| only and decrease in |S|.
    std::vector<double> delta(n, -1.0);
    for (int i = 0; i < n; ++i)
      for (std::uint32_t c = 0; c < subsets; ++c) {
        const std::uint32_t full = GimSetting::expand(i, c);
        double prod = 1.0;
        int size = 0;
        for (int j = 0; j < n; ++j)
          if (full >> j & 1u) {
            prod *= s.continuation[j];
            ++size;
          }
        if (prod <= 0.0) continue;
        const double d = s.externality[i][c] / prod;
        if (delta[size] < 0.0) delta[size] = d;
        else if (std::abs(delta[size] - d) > 1e-7)
          out.push_back("hybrid position factor: f[" + idx(i) + "] at subset " + std::to_string(full));
      }
  }
}

}  // namespace detail

// Empty iff every model invariant holds; each entry names the invariant first.
inline std::vector<std::string> validate_setting(const Setting& setting) {
  std::vector<std::string> out;
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) detail::validate_auction(*a, out);
  else detail::validate_gim(std::get<GimSetting>(setting), out);
  return out;
}

}  // namespace posauc
