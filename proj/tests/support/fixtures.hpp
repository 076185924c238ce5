#pragma once

// Small hand-built settings shared by several test files.

#include <vector>

#include "posauc/model.hpp"

namespace fixture {

using posauc::AuctionSetting;
using posauc::GimSetting;
using posauc::ModelKind;

// Two agents, two slots, common CTRs (0.5, 0.25), values 10 and 4.
inline AuctionSetting eos_pair() {
  AuctionSetting s;
  s.n = 2;
  s.m = 2;
  s.model_kind = ModelKind::EOS;
  s.clicks = {{0.5, 0.25}, {0.5, 0.25}};
  s.values = {{10, 10}, {4, 4}};
  s.qualities = {0.5, 0.5};
  return s;
}

// Separable CTRs with position factors (1, 0.5) and qualities (0.8, 0.4).
inline AuctionSetting v_pair() {
  AuctionSetting s;
  s.n = 2;
  s.m = 2;
  s.model_kind = ModelKind::V;
  s.clicks = {{0.8, 0.4}, {0.4, 0.2}};
  s.values = {{5, 5}, {4, 4}};
  s.qualities = {0.8, 0.4};
  return s;
}

inline GimSetting cascade(const std::vector<double>& q, const std::vector<double>& cont, const std::vector<double>& v,
                          int m) {
  GimSetting g;
  g.n = static_cast<int>(v.size());
  g.m = m;
  g.model_kind = ModelKind::Cascade;
  g.values = v;
  g.qualities = q;
  g.continuation = cont;
  g.externality.assign(g.n, std::vector<double>(std::size_t{1} << (g.n - 1), 1.0));
  for (int i = 0; i < g.n; ++i)
    for (std::uint32_t c = 0; c < g.externality[i].size(); ++c) {
      const std::uint32_t full = GimSetting::expand(i, c);
      double f = 1.0;
      for (int j = 0; j < g.n; ++j)
        if (full >> j & 1u) f *= cont[j];
      g.externality[i][c] = f;
    }
  return g;
}

// Cascade with continuation (0.5, 0.8), unit qualities, values 10 and 4.
inline GimSetting cascade_pair() { return cascade({1.0, 1.0}, {0.5, 0.8}, {10, 4}, 2); }

}  // namespace fixture
