#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "posauc/metrics.hpp"
#include "posauc/model.hpp"
#include "posauc/solver.hpp"

namespace posauc {

using Json = nlohmann::ordered_json;

class SettingFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json to_json(const Setting& setting) {
  Json j;
  if (const auto* a = std::get_if<AuctionSetting>(&setting)) {
    j["model_kind"] = std::string(to_string(a->model_kind));
    j["n"] = a->n;
    j["m"] = a->m;
    j["values"] = a->values;
    j["clicks"] = a->clicks;
    j["qualities"] = a->qualities;
    return j;
  }
  const auto& g = std::get<GimSetting>(setting);
  j["model_kind"] = std::string(to_string(g.model_kind));
  j["n"] = g.n;
  j["m"] = g.m;
  j["values"] = g.values;
  j["qualities"] = g.qualities;
  if (g.has_continuation()) j["continuation"] = g.continuation;
  // f[i] keyed by the bitmask over all agents (decimal), bit i always clear.
  Json f = Json::array();
  for (int i = 0; i < g.n; ++i) {
    Json row = Json::object();
    for (std::uint32_t c = 0; c < g.externality[i].size(); ++c)
      row[std::to_string(GimSetting::expand(i, c))] = g.externality[i][c];
    f.push_back(std::move(row));
  }
  j["f"] = std::move(f);
  return j;
}

inline Setting setting_from_json(const Json& j) {
  try {
    const ModelKind kind = parse_model_kind(j.at("model_kind").get<std::string>());
    if (!has_externalities(kind)) {
      AuctionSetting a;
      a.model_kind = kind;
      a.n = j.at("n").get<int>();
      a.m = j.at("m").get<int>();
      a.values = j.at("values").get<std::vector<std::vector<double>>>();
      a.clicks = j.at("clicks").get<std::vector<std::vector<double>>>();
      a.qualities = j.at("qualities").get<std::vector<double>>();
      return a;
    }
    GimSetting g;
    g.model_kind = kind;
    g.n = j.at("n").get<int>();
    g.m = j.at("m").get<int>();
    if (g.n < 1 || g.n > 20) throw SettingFormatError("n must be in [1,20] for externality settings");
    g.values = j.at("values").get<std::vector<double>>();
    g.qualities = j.at("qualities").get<std::vector<double>>();
    if (j.contains("continuation")) g.continuation = j.at("continuation").get<std::vector<double>>();
    const auto& f = j.at("f");
    if (!f.is_array() || static_cast<int>(f.size()) != g.n) throw SettingFormatError("f needs one map per agent");
    g.externality.assign(g.n, std::vector<double>(std::size_t{1} << (g.n - 1), -1.0));
    for (int i = 0; i < g.n; ++i)
      for (const auto& [key, value] : f[i].items()) {
        std::size_t used = 0;
        const unsigned long mask = std::stoul(key, &used);
        if (used != key.size() || mask >> g.n || (mask >> i & 1u))
          throw SettingFormatError("bad subset key '" + key + "' for agent " + std::to_string(i));
        g.externality[i][GimSetting::compress(i, static_cast<std::uint32_t>(mask))] = value.get<double>();
      }
    for (int i = 0; i < g.n; ++i)
      for (double v : g.externality[i])
        if (v < 0.0) throw SettingFormatError("f of agent " + std::to_string(i) + " is missing subsets");
    return g;
  } catch (const Json::exception& e) {
    throw SettingFormatError(std::string("malformed setting: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SettingFormatError(std::string("malformed setting: ") + e.what());
  }
}

// Parses text, reporting the byte offset of syntax errors.
inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SettingFormatError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json to_json(const MetricVector& m) {
  Json j;
  j["efficiency"] = m.efficiency;
  j["revenue"] = m.revenue;
  j["relevance"] = m.relevance;
  if (m.envy_defined) j["envy"] = m.envy;
  return j;
}

inline Json to_json(const EquilibriumSet& e) {
  Json j;
  j["game_id"] = e.game_id;
  j["solved"] = e.solved;
  j["equilibria"] = e.equilibria;
  Json metrics = Json::array();
  for (const auto& m : e.metrics) metrics.push_back(to_json(m));
  j["metrics"] = std::move(metrics);
  return j;
}

inline EquilibriumSet equilibrium_set_from_json(const Json& j) {
  EquilibriumSet e;
  e.game_id = j.at("game_id").get<std::string>();
  e.solved = j.at("solved").get<bool>();
  e.equilibria = j.at("equilibria").get<std::vector<std::vector<int>>>();
  for (const auto& m : j.at("metrics")) {
    MetricVector mv;
    mv.efficiency = m.at("efficiency").get<double>();
    mv.revenue = m.at("revenue").get<double>();
    mv.relevance = m.at("relevance").get<double>();
    if (m.contains("envy")) {
      mv.envy = m.at("envy").get<double>();
      mv.envy_defined = true;
    }
    e.metrics.push_back(mv);
  }
  return e;
}

}  // namespace posauc
