#pragma once

// Experiment harness: sample instances, solve every configured auction, and
// write per-instance artifacts, summary tables and pairwise relations.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "posauc/encoders.hpp"
#include "posauc/json_io.hpp"
#include "posauc/mechanisms.hpp"
#include "posauc/metrics.hpp"
#include "posauc/model.hpp"
#include "posauc/solver.hpp"
#include "posauc/stats.hpp"

namespace posauc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<std::string> distributions;
  std::vector<std::string> mechanisms;
  bool vcg = true;
  bool dvcg = true;
  int n = 5;
  int m = 5;
  int k = 30;
  int instances = 200;
  std::uint64_t seed = 0;
  int resamples = kDefaultResamples;
  long long budget = kDefaultProfileBudget;
  long long max_table_entries = 50'000'000;
  std::string out = "results";
  std::string preset = "main";
  int jobs = 1;
  bool write_instances = true;
  LogNormalParams ln_value;
  LogNormalParams ln_quality;
};

struct Cell {
  std::string label;
  int n = 0;
  int m = 0;
  int k = 0;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"main",     "wgfp",    "cwgsp",   "tiebreak",
                                              "rounding", "scale_k", "scale_n", "scale_m"};
  return names;
}

struct PresetDefaults {
  std::vector<std::string> distributions;
  std::vector<std::string> mechanisms;
  bool vcg = true;
  bool dvcg = true;
};

inline PresetDefaults preset_defaults(const std::string& preset) {
  PresetDefaults d;
  d.distributions = all_families();
  if (preset == "main" || preset == "scale_k" || preset == "scale_n" || preset == "scale_m") {
    d.mechanisms = {"GFP", "uGSP", "wGSP"};
  } else if (preset == "wgfp") {
    d.mechanisms = {"GFP", "wGFP", "uGSP", "wGSP"};
  } else if (preset == "cwgsp") {
    d.distributions = {"CAS-UNI", "CAS-LN"};
    d.mechanisms = {"uGSP", "wGSP", "cwGSP"};
  } else if (preset == "tiebreak") {
    d.mechanisms = {"GFP", "GFP+lex", "uGSP", "uGSP+lex", "wGSP", "wGSP+lex"};
    d.vcg = d.dvcg = false;
  } else if (preset == "rounding") {
    d.mechanisms = {"uGSP", "uGSP+down", "uGSP+nearest", "uGSP+up1", "wGSP", "wGSP+down", "wGSP+nearest", "wGSP+up1"};
    d.vcg = d.dvcg = false;
  } else {
    throw ConfigError("unknown preset: " + preset);
  }
  return d;
}

inline std::vector<Cell> experiment_cells(const ExperimentConfig& c) {
  auto label = [](int n, int m, int k) {
    return "n" + std::to_string(n) + "_m" + std::to_string(m) + "_k" + std::to_string(k);
  };
  std::vector<Cell> cells;
  if (c.preset == "scale_k") {
    for (int k = 5; k <= 40; k += 5) cells.push_back({label(c.n, c.m, k), c.n, c.m, k});
  } else if (c.preset == "scale_n") {
    for (int n = 2; n <= 10; ++n) cells.push_back({label(n, c.m, c.k), n, c.m, c.k});
  } else if (c.preset == "scale_m") {
    for (int m = 1; m <= 5; ++m) cells.push_back({label(c.n, m, c.k), c.n, m, c.k});
  } else {
    cells.push_back({label(c.n, c.m, c.k), c.n, c.m, c.k});
  }
  return cells;
}

inline DistributionSpec distribution_for(const ExperimentConfig& c, const std::string& family) {
  DistributionSpec spec = parse_family(family);
  spec.ln_value = c.ln_value;
  spec.ln_quality = c.ln_quality;
  return spec;
}

inline void validate_config(const ExperimentConfig& c) {
  if (std::find(preset_names().begin(), preset_names().end(), c.preset) == preset_names().end())
    throw ConfigError("unknown preset: " + c.preset);
  if (c.mechanisms.empty()) throw ConfigError("mechanism list is empty");
  if (c.distributions.empty()) throw ConfigError("distribution list is empty");
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (c.n < 1 || c.m < 1) throw ConfigError("n and m must be at least 1");
  if (c.instances < 1) throw ConfigError("instances must be at least 1");
  if (c.resamples < 1) throw ConfigError("resamples must be at least 1");
  if (c.budget < 1) throw ConfigError("budget must be at least 1");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  std::vector<std::string> seen;
  for (const auto& name : c.mechanisms) {
    if (name == "VCG" || name == "dVCG") throw ConfigError("VCG baselines are toggled with the vcg/dvcg flags");
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) throw ConfigError("duplicate mechanism: " + name);
    seen.push_back(name);
  }
  for (const auto& family : c.distributions) {
    DistributionSpec spec;
    try {
      spec = distribution_for(c, family);
      check_spec(spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    for (const auto& cell : experiment_cells(c))
      if (has_externalities(spec.model_kind) && cell.n > 20)
        throw ConfigError("externality settings are limited to 20 agents");
    for (const auto& name : c.mechanisms) {
      MechanismSpec mech;
      try {
        mech = parse_mechanism(name, c.k);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (mech.weight_rule == WeightRule::CascadeWeight && spec.model_kind != ModelKind::Cascade &&
          spec.model_kind != ModelKind::Hybrid)
        throw ConfigError(name + " needs continuation probabilities, which " + family + " lacks");
    }
  }
}

// Reads a JSON config; fields absent from the file take the preset's defaults.
inline ExperimentConfig config_from_json(const Json& j, const std::optional<std::string>& preset_override = {}) {
  ExperimentConfig c;
  try {
    c.preset = preset_override ? *preset_override : j.value("preset", std::string("main"));
    const auto d = preset_defaults(c.preset);
    c.distributions = j.contains("distributions") ? j.at("distributions").get<std::vector<std::string>>() : d.distributions;
    c.mechanisms = j.contains("mechanisms") ? j.at("mechanisms").get<std::vector<std::string>>() : d.mechanisms;
    c.vcg = j.value("vcg", d.vcg);
    c.dvcg = j.value("dvcg", d.dvcg);
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.m);
    c.k = j.value("k", c.k);
    c.instances = j.value("instances", c.instances);
    c.seed = j.value("seed", c.seed);
    c.resamples = j.value("resamples", c.resamples);
    c.budget = j.value("budget", c.budget);
    c.max_table_entries = j.value("max_table_entries", c.max_table_entries);
    c.out = j.value("out", c.out);
    c.jobs = j.value("jobs", c.jobs);
    c.write_instances = j.value("write_instances", c.write_instances);
    if (j.contains("ln_value")) {
      c.ln_value.location = j.at("ln_value").value("location", 0.0);
      c.ln_value.scale = j.at("ln_value").value("scale", 1.0);
    }
    if (j.contains("ln_quality")) {
      c.ln_quality.location = j.at("ln_quality").value("location", 0.0);
      c.ln_quality.scale = j.at("ln_quality").value("scale", 1.0);
    }
    static const std::vector<std::string> known{"preset",    "distributions", "mechanisms", "vcg",   "dvcg",
                                                "n",         "m",             "k",          "instances", "seed",
                                                "resamples", "budget",        "max_table_entries", "out",
                                                "jobs",      "write_instances", "ln_value", "ln_quality"};
    for (const auto& item : j.items())
      if (std::find(known.begin(), known.end(), item.key()) == known.end())
        throw ConfigError("unknown config field: " + item.key());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Per-instance pipeline

enum class Baseline { None, Vcg, DiscreteVcg };

struct MechanismResult {
  std::string name;
  Baseline baseline = Baseline::None;
  EquilibriumSet equilibria;
  long long profiles = 0;
  SizeStats size{};
  std::string failure_stage;  // empty when the pipeline completed
  std::string failure_reason;

  bool bound_substituted() const { return !failure_stage.empty() || !equilibria.solved || equilibria.equilibria.empty(); }
};

struct InstanceResult {
  std::string distribution;
  int index = 0;
  std::uint64_t seed = 0;
  std::optional<Setting> setting;
  Normalizers norm;
  std::string failure_stage;
  std::string failure_reason;
  std::vector<MechanismResult> mechanisms;
};

struct PipelineOptions {
  int k = 1;
  long long budget = kDefaultProfileBudget;
  long long max_table_entries = 50'000'000;
  int psne_jobs = 1;
};

inline MechanismResult solve_mechanism(const Setting& setting, const Normalizers& norm, const std::string& name,
                                       const PipelineOptions& opt) {
  MechanismResult r;
  r.name = name;
  r.equilibria.game_id = name;
  if (name == "VCG" || name == "dVCG") {
    r.baseline = name == "VCG" ? Baseline::Vcg : Baseline::DiscreteVcg;
    const auto v = name == "VCG" ? vcg(setting) : vcg(setting, opt.k);
    r.equilibria.equilibria.push_back({});
    r.equilibria.metrics.push_back(metric_vector(v.outcome, setting, norm));
    r.profiles = 1;
    return r;
  }
  const MechanismSpec mech = parse_mechanism(name, opt.k);
  EncodeOptions enc;
  enc.bids = prune_dominated(setting, opt.k);
  enc.max_table_entries = opt.max_table_entries;
  EncodedGame eg;
  try {
    eg = encode(setting, mech, enc);
  } catch (const EncodingTooLarge& e) {
    r.failure_stage = "encode";
    r.failure_reason = e.what();
    r.equilibria.solved = false;
    return r;
  }
  r.size = size_stats(eg.game);
  const auto psne = enumerate_psne(eg.game, opt.budget, opt.psne_jobs);
  r.profiles = psne.profiles;
  r.equilibria.solved = psne.solved;
  for (const auto& p : psne.equilibria) {
    auto bids = eg.bids_of(p);
    r.equilibria.metrics.push_back(metric_vector(simulate_outcome(setting, mech, bids), setting, norm));
    r.equilibria.equilibria.push_back(std::move(bids));
  }
  return r;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t instance_seed(std::uint64_t master, const std::string& family, int index) {
  return derive_seed(master, fnv1a(family), static_cast<std::uint64_t>(index));
}

inline std::vector<std::string> mechanism_list(const ExperimentConfig& c) {
  std::vector<std::string> names = c.mechanisms;
  if (c.vcg) names.push_back("VCG");
  if (c.dvcg) names.push_back("dVCG");
  return names;
}

inline InstanceResult run_instance(const DistributionSpec& spec, const std::string& family, int index,
                                   std::uint64_t seed, int n, int m, const std::vector<std::string>& mechanisms,
                                   const PipelineOptions& opt) {
  InstanceResult r;
  r.distribution = family;
  r.index = index;
  r.seed = seed;
  try {
    Rng rng(seed);
    Setting s = sample_setting(spec, n, m, rng);
    r.setting = normalize_setting(std::move(s), opt.k);
  } catch (const SamplingError& e) {
    r.failure_stage = "sample";
    r.failure_reason = e.what();
    return r;
  } catch (const DegenerateSettingError& e) {
    r.failure_stage = "normalize";
    r.failure_reason = e.what();
    return r;
  }
  r.norm = Normalizers::of(*r.setting);
  for (const auto& name : mechanisms) r.mechanisms.push_back(solve_mechanism(*r.setting, r.norm, name, opt));
  return r;
}

// Selection summary of one metric, with bound substitution when needed.
inline SelectionSummary summarize(const InstanceResult& inst, const MechanismResult& mr, MetricKind k) {
  if (mr.bound_substituted()) {
    const auto [lo, hi] = bounds_for_unsolved(k, *inst.setting, inst.norm);
    return SelectionSummary::interval(lo, hi);
  }
  const auto v = mr.equilibria.values(k);
  return SelectionSummary::exact(select(v, Selection::Min), select(v, Selection::Median), select(v, Selection::Max));
}

// ---------------------------------------------------------------------------
// Reports

struct SummaryRow {
  std::string mechanism;
  MetricKind metric;
  std::array<double, 3> mean{};
  std::array<double, 3> sd{};
  int n = 0;
};

struct RelationRow {
  MetricKind metric;
  std::string a, b;
  PairRelation relation;
};

struct DistributionReport {
  std::string cell;
  std::string distribution;
  std::vector<std::string> mechanisms;
  std::vector<MetricKind> metrics;
  std::vector<InstanceResult> instances;
  std::vector<SummaryRow> summary;
  std::vector<RelationRow> relations;
  int num_tests = 0;
};

struct ComparisonReport {
  std::vector<DistributionReport> blocks;
  int failures = 0;
};

inline std::vector<MetricKind> metrics_for(const DistributionSpec& spec) {
  if (has_externalities(spec.model_kind)) return {MetricKind::Efficiency, MetricKind::Revenue, MetricKind::Relevance};
  return {kAllMetrics.begin(), kAllMetrics.end()};
}

inline void compute_statistics(DistributionReport& rep, const ExperimentConfig& c) {
  std::vector<const InstanceResult*> usable;
  for (const auto& inst : rep.instances)
    if (inst.setting) usable.push_back(&inst);
  for (std::size_t mi = 0; mi < rep.mechanisms.size(); ++mi)
    for (MetricKind k : rep.metrics) {
      SummaryRow row;
      row.mechanism = rep.mechanisms[mi];
      row.metric = k;
      std::array<std::vector<double>, 3> vals;
      for (const auto* inst : usable) {
        const auto& mr = inst->mechanisms[mi];
        if (mr.bound_substituted()) continue;
        const auto s = summarize(*inst, mr, k);
        for (int t = 0; t < 3; ++t) vals[t].push_back(s.lo[t]);
      }
      row.n = static_cast<int>(vals[0].size());
      for (int t = 0; t < 3; ++t) {
        if (vals[t].empty()) {
          row.mean[t] = row.sd[t] = std::nan("");
          continue;
        }
        double sum = 0.0;
        for (double v : vals[t]) sum += v;
        row.mean[t] = sum / vals[t].size();
        double ss = 0.0;
        for (double v : vals[t]) ss += (v - row.mean[t]) * (v - row.mean[t]);
        row.sd[t] = vals[t].size() > 1 ? std::sqrt(ss / (vals[t].size() - 1)) : 0.0;
      }
      rep.summary.push_back(row);
    }
  const int pairs = static_cast<int>(rep.mechanisms.size() * (rep.mechanisms.size() - 1) / 2);
  rep.num_tests = std::max(1, pairs * static_cast<int>(rep.metrics.size()));
  if (usable.empty()) return;
  for (std::size_t mk = 0; mk < rep.metrics.size(); ++mk) {
    const MetricKind k = rep.metrics[mk];
    std::vector<std::vector<SelectionSummary>> data(rep.mechanisms.size());
    for (std::size_t mi = 0; mi < rep.mechanisms.size(); ++mi)
      for (const auto* inst : usable) data[mi].push_back(summarize(*inst, inst->mechanisms[mi], k));
    for (std::size_t a = 0; a < rep.mechanisms.size(); ++a)
      for (std::size_t b = a + 1; b < rep.mechanisms.size(); ++b) {
        ClassifyOptions opt;
        opt.num_tests = rep.num_tests;
        opt.resamples = c.resamples;
        opt.seed = derive_seed(c.seed, fnv1a(rep.cell + "/" + rep.distribution), mk * 1000 + a * 31 + b);
        rep.relations.push_back({k, rep.mechanisms[a], rep.mechanisms[b], classify_pair(data[a], data[b], opt)});
      }
  }
}

inline std::string fmt(double x, int digits = 6) {
  if (std::isnan(x)) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline Json instance_json(const InstanceResult& inst, const Cell& cell, const std::vector<MetricKind>& metrics) {
  Json j;
  j["distribution"] = inst.distribution;
  j["index"] = inst.index;
  j["seed"] = inst.seed;
  j["n"] = cell.n;
  j["m"] = cell.m;
  j["k"] = cell.k;
  if (!inst.failure_stage.empty()) {
    j["failure"] = {{"stage", inst.failure_stage}, {"reason", inst.failure_reason}};
    return j;
  }
  j["setting"] = to_json(*inst.setting);
  j["max_welfare"] = inst.norm.max_welfare;
  j["max_clicks"] = inst.norm.max_clicks;
  Json mechs = Json::array();
  for (const auto& mr : inst.mechanisms) {
    Json mj;
    mj["name"] = mr.name;
    mj["profiles"] = mr.profiles;
    if (mr.baseline == Baseline::None)
      mj["size"] = {{"action_nodes", mr.size.action_nodes},
                    {"function_nodes", mr.size.function_nodes},
                    {"table_entries", mr.size.total_table_entries}};
    if (!mr.failure_stage.empty()) mj["failure"] = {{"stage", mr.failure_stage}, {"reason", mr.failure_reason}};
    mj["bound_substituted"] = mr.bound_substituted();
    mj["result"] = to_json(mr.equilibria);
    Json sel;
    for (MetricKind k : metrics) {
      const auto s = summarize(inst, mr, k);
      sel[std::string(to_string(k))] = {{"min", {s.lo[0], s.hi[0]}}, {"median", {s.lo[1], s.hi[1]}}, {"max", {s.lo[2], s.hi[2]}}};
    }
    mj["selection"] = std::move(sel);
    mechs.push_back(std::move(mj));
  }
  j["mechanisms"] = std::move(mechs);
  return j;
}

inline std::string summary_csv(const DistributionReport& rep) {
  std::ostringstream os;
  os << "mechanism,metric,min_mean,min_sd,median_mean,median_sd,max_mean,max_sd,n\n";
  for (const auto& r : rep.summary) {
    os << r.mechanism << ',' << to_string(r.metric);
    for (int t = 0; t < 3; ++t) os << ',' << fmt(r.mean[t]) << ',' << fmt(r.sd[t]);
    os << ',' << r.n << '\n';
  }
  return os.str();
}

inline std::string relations_csv(const DistributionReport& rep) {
  std::ostringstream os;
  os << "metric,a,b,relation,direction,stars,symbol,tests\n";
  for (const auto& r : rep.relations)
    os << to_string(r.metric) << ',' << r.a << ',' << r.b << ',' << r.relation.kind_name() << ','
       << r.relation.direction << ',' << r.relation.stars << ',' << r.relation.symbol() << ',' << rep.num_tests << '\n';
  return os.str();
}

// Row mechanism compared with column mechanism.
inline std::string relations_markdown(const DistributionReport& rep, MetricKind k) {
  std::ostringstream os;
  os << "# " << rep.distribution << " " << to_string(k) << " (" << rep.cell << ", " << rep.num_tests
     << " tests)\n\n| |";
  for (const auto& m : rep.mechanisms) os << ' ' << m << " |";
  os << "\n|---|";
  for (std::size_t t = 0; t < rep.mechanisms.size(); ++t) os << "---|";
  os << '\n';
  for (const auto& a : rep.mechanisms) {
    os << "| " << a << " |";
    for (const auto& b : rep.mechanisms) {
      std::string cell = "";
      for (const auto& r : rep.relations) {
        if (r.metric != k) continue;
        if (r.a == a && r.b == b) cell = r.relation.symbol();
        if (r.a == b && r.b == a) {
          PairRelation flipped = r.relation;
          flipped.direction = -flipped.direction;
          cell = flipped.symbol();
        }
      }
      os << ' ' << cell << " |";
    }
    os << '\n';
  }
  return os.str();
}

inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["preset"] = c.preset;
  j["distributions"] = c.distributions;
  j["mechanisms"] = c.mechanisms;
  j["vcg"] = c.vcg;
  j["dvcg"] = c.dvcg;
  j["n"] = c.n;
  j["m"] = c.m;
  j["k"] = c.k;
  j["instances"] = c.instances;
  j["seed"] = c.seed;
  j["resamples"] = c.resamples;
  j["budget"] = c.budget;
  j["max_table_entries"] = c.max_table_entries;
  j["ln_value"] = {{"location", c.ln_value.location}, {"scale", c.ln_value.scale}};
  j["ln_quality"] = {{"location", c.ln_quality.location}, {"scale", c.ln_quality.scale}};
  return j;
}

struct RunCallbacks {
  // Called after each (cell, distribution) block completes.
  std::function<void(const DistributionReport&)> on_block;
};

inline ComparisonReport run_experiment(const ExperimentConfig& c, const RunCallbacks& cb = {}) {
  validate_config(c);
  ComparisonReport report;
  const std::filesystem::path root(c.out);
  const auto names = mechanism_list(c);
  std::ostringstream failures;
  failures << "cell,distribution,instance,mechanism,stage,reason\n";
  Json run;
  run["config"] = config_json(c);
  Json blocks = Json::array();

  for (const auto& cell : experiment_cells(c)) {
    for (const auto& family : c.distributions) {
      const DistributionSpec spec = distribution_for(c, family);
      DistributionReport rep;
      rep.cell = cell.label;
      rep.distribution = family;
      rep.mechanisms = names;
      rep.metrics = metrics_for(spec);
      rep.instances.resize(c.instances);
      PipelineOptions opt;
      opt.k = cell.k;
      opt.budget = c.budget;
      opt.max_table_entries = c.max_table_entries;
      std::atomic<int> next{0};
      auto work = [&] {
        for (int idx = next++; idx < c.instances; idx = next++)
          rep.instances[idx] =
              run_instance(spec, family, idx, instance_seed(c.seed, family, idx), cell.n, cell.m, names, opt);
      };
      const int workers = std::min(c.jobs, c.instances);
      if (workers <= 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
      }
      compute_statistics(rep, c);

      const auto dir = root / cell.label / family;
      for (const auto& inst : rep.instances) {
        if (!inst.failure_stage.empty()) {
          failures << cell.label << ',' << family << ',' << inst.index << ",," << inst.failure_stage << ",\""
                   << inst.failure_reason << "\"\n";
          ++report.failures;
        }
        for (const auto& mr : inst.mechanisms)
          if (!mr.failure_stage.empty()) {
            failures << cell.label << ',' << family << ',' << inst.index << ',' << mr.name << ',' << mr.failure_stage
                     << ",\"" << mr.failure_reason << "\"\n";
            ++report.failures;
          }
        if (c.write_instances)
          write_text(dir / "instances" / ("instance_" + std::to_string(inst.index) + ".json"),
                     instance_json(inst, cell, rep.metrics).dump(1) + "\n");
      }
      write_text(dir / "summary.csv", summary_csv(rep));
      write_text(dir / "relations.csv", relations_csv(rep));
      for (MetricKind k : rep.metrics)
        write_text(dir / ("relations_" + std::string(to_string(k)) + ".md"), relations_markdown(rep, k));
      int unsolved = 0;
      for (const auto& inst : rep.instances)
        for (const auto& mr : inst.mechanisms) unsolved += inst.setting && mr.bound_substituted();
      blocks.push_back({{"cell", cell.label},
                        {"distribution", family},
                        {"bonferroni_tests", rep.num_tests},
                        {"bound_substituted_games", unsolved}});
      if (cb.on_block) cb.on_block(rep);
      report.blocks.push_back(std::move(rep));
    }
  }
  run["blocks"] = std::move(blocks);
  run["failures"] = report.failures;
  write_text(root / "run.json", run.dump(1) + "\n");
  write_text(root / "failures.csv", failures.str());
  return report;
}

// ---------------------------------------------------------------------------
// Instance description

inline std::string describe_instance(const std::string& text) {
  const Json doc = parse_json_text(text);
  const Json& sj = doc.contains("setting") ? doc.at("setting") : doc;
  const Setting setting = setting_from_json(sj);
  std::ostringstream os;
  os << std::setprecision(6);
  const int n = agent_count(setting);
  os << "model: " << to_string(model_kind(setting)) << "\nagents: " << n << "\nslots: " << slot_count(setting) << '\n';
  const auto violations = validate_setting(setting);
  os << "invariants: " << (violations.empty() ? "ok" : std::to_string(violations.size()) + " violation(s)") << '\n';
  for (const auto& v : violations) os << "  " << v << '\n';
  os << "qualities:";
  for (double q : qualities(setting)) os << ' ' << q;
  os << '\n';
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) {
    os << "values per click [agent x position]:\n";
    for (const auto& row : a->values) {
      os << ' ';
      for (double v : row) os << ' ' << v;
      os << '\n';
    }
    os << "click probabilities [agent x position]:\n";
    for (const auto& row : a->clicks) {
      os << ' ';
      for (double v : row) os << ' ' << v;
      os << '\n';
    }
  } else {
    const auto& g = std::get<GimSetting>(setting);
    os << "values per click:";
    for (double v : g.values) os << ' ' << v;
    os << '\n';
    if (g.has_continuation()) {
      os << "continuation:";
      for (double v : g.continuation) os << ' ' << v;
      os << '\n';
      // Spot-check f against the continuation product on the full rival set.
      for (int i = 0; i < g.n; ++i) {
        const std::uint32_t rivals = ((g.n >= 32 ? 0u : (1u << g.n)) - 1u) & ~(1u << i);
        double prod = 1.0;
        for (int j = 0; j < g.n; ++j)
          if (rivals >> j & 1u) prod *= g.continuation[j];
        os << "  f[" << i << "](all rivals) = " << g.f(i, rivals) << ", continuation product = " << prod << '\n';
      }
    }
  }
  const auto best = max_welfare(setting);
  os << "max welfare: " << best.welfare << "\nmax clicks: " << max_clicks(setting) << '\n';
  int k = 0;
  if (doc.contains("k")) k = doc.at("k").get<int>();
  if (k <= 0) {
    double top = 0.0;
    for (int i = 0; i < n; ++i) top = std::max(top, max_value(setting, i));
    k = std::max(1, static_cast<int>(std::ceil(snap_integer(top))));
  }
  os << "bid grid: 0.." << k << "\npruned bid ranges:\n";
  const auto allowed = prune_dominated(setting, k);
  for (int i = 0; i < n; ++i) os << "  agent " << i << ": 0.." << allowed[i].back() << '\n';
  return os.str();
}

}  // namespace posauc
