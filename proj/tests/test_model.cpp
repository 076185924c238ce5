#include <gtest/gtest.h>

#include <cmath>

#include "posauc/json_io.hpp"
#include "posauc/model.hpp"
#include "support/fixtures.hpp"

using namespace posauc;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

DistributionSpec seeded(const std::string& family, std::uint64_t seed) {
  auto spec = parse_family(family);
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Families, RoundTripNames) {
  for (const auto& f : all_families()) EXPECT_EQ(family_name(parse_family(f)), f);
  EXPECT_EQ(all_families().size(), 13u);
  EXPECT_THROW(parse_family("XYZ-UNI"), std::invalid_argument);
  EXPECT_THROW(parse_family("V-GAUSS"), std::invalid_argument);
}

TEST(Sampler, SingleAgentEos) {
  const auto s = std::get<AuctionSetting>(sample_setting(seeded("EOS-UNI", 3), 1, 1));
  ASSERT_EQ(s.n, 1);
  EXPECT_GT(s.clicks[0][0], 0.0);
  EXPECT_LE(s.clicks[0][0], 1.0);
  EXPECT_TRUE(validate_setting(s).empty());
}

TEST(Sampler, VFactorizes) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = std::get<AuctionSetting>(sample_setting(seeded("V-UNI", seed), 3, 3));
    for (int i = 0; i < 3; ++i)
      for (int i2 = 0; i2 < 3; ++i2)
        for (int j = 0; j < 3; ++j)
          for (int j2 = 0; j2 < 3; ++j2)
            EXPECT_NEAR(s.clicks[i][j] * s.clicks[i2][j2], s.clicks[i][j2] * s.clicks[i2][j], 1e-12);
    // Position factors are the clicks divided by quality and must not increase.
    for (int j = 1; j < 3; ++j) EXPECT_LE(s.clicks[0][j] / s.qualities[0], s.clicks[0][j - 1] / s.qualities[0]);
  }
}

TEST(Sampler, CascadeFromContinuation) {
  const auto g = std::get<GimSetting>(sample_setting(seeded("CAS-UNI", 11), 2, 2));
  ASSERT_EQ(g.continuation.size(), 2u);
  EXPECT_EQ(g.f(0, 0b10), g.continuation[1]);
  EXPECT_EQ(g.f(1, 0b01), g.continuation[0]);
  EXPECT_EQ(g.f(0, 0), 1.0);
  EXPECT_EQ(g.f(1, 0), 1.0);
}

TEST(Sampler, EveryFamilyProducesValidInstances) {
  for (const auto& f : all_families())
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = sample_setting(seeded(f, seed), 4, 3);
      EXPECT_TRUE(validate_setting(s).empty()) << f << " seed " << seed;
      EXPECT_EQ(model_kind(s), parse_family(f).model_kind);
    }
}

TEST(Sampler, DeterministicInSeed) {
  for (const auto& f : all_families()) {
    EXPECT_TRUE(to_json(sample_setting(seeded(f, 5), 4, 4)) == to_json(sample_setting(seeded(f, 5), 4, 4))) << f;
  }
  EXPECT_FALSE(to_json(sample_setting(seeded("V-LN", 5), 4, 4)) == to_json(sample_setting(seeded("V-LN", 6), 4, 4)));
}

TEST(Sampler, SlotsBeyondMHaveNoClicks) {
  const auto s = std::get<AuctionSetting>(sample_setting(seeded("BHN-UNI", 2), 4, 2));
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.clicks[i][2], 0.0);
    EXPECT_EQ(s.clicks[i][3], 0.0);
  }
}

TEST(Sampler, InfeasibleRangeReportsFailure) {
  auto spec = seeded("V-UNI", 1);
  spec.quality_range = {0.5, 0.2};
  EXPECT_THROW(sample_setting(spec, 3, 3), std::invalid_argument);
  EXPECT_THROW(sample_setting(spec, 0, 3), std::invalid_argument);
}

TEST(Normalize, UniformScaling) {
  AuctionSetting s = fixture::eos_pair();
  s.values = {{2, 2}, {4, 4}};
  const auto out = std::get<AuctionSetting>(normalize_setting(s, 8));
  EXPECT_EQ(out.values, (std::vector<std::vector<double>>{{4, 4}, {8, 8}}));
}

TEST(Normalize, IdentityWhenAlreadyScaled) {
  AuctionSetting s = fixture::eos_pair();
  s.values = {{8, 8}, {3, 3}};
  EXPECT_EQ(std::get<AuctionSetting>(normalize_setting(s, 8)), s);
}

TEST(Normalize, RatiosPreserved) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto raw = std::get<AuctionSetting>(sample_setting(seeded("V-LN", seed), 4, 4));
    const auto s = std::get<AuctionSetting>(normalize_setting(raw, 30));
    double top = 0.0;
    for (int i = 0; i < 4; ++i) top = std::max(top, s.max_value(i));
    EXPECT_EQ(top, 30.0);
    for (int i = 0; i < 4; ++i)
      for (int i2 = 0; i2 < 4; ++i2)
        EXPECT_NEAR(s.values[i][0] / s.values[i2][0], raw.values[i][0] / raw.values[i2][0],
                    1e-12 * std::max(1.0, raw.values[i][0] / raw.values[i2][0]));
  }
}

TEST(Normalize, AllZeroIsDegenerate) {
  AuctionSetting s = fixture::eos_pair();
  s.values = {{0, 0}, {0, 0}};
  EXPECT_THROW(normalize_setting(s, 5), DegenerateSettingError);
}

TEST(Validate, ValidInstanceHasNoViolations) {
  EXPECT_TRUE(validate_setting(fixture::v_pair()).empty());
  EXPECT_TRUE(validate_setting(fixture::cascade_pair()).empty());
}

TEST(Validate, PerImpressionMonotonicity) {
  AuctionSetting s = fixture::v_pair();
  s.model_kind = ModelKind::BHN;
  s.values = {{5, 12}, {4, 9}};  // 0.4*12 = 4.8 > 0.8*5 = 4 for agent 0
  s.values[1] = {4, 4};
  const auto v = validate_setting(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("per-impression monotonicity"), std::string::npos);
}

TEST(Validate, ExternalityNormalization) {
  GimSetting g = fixture::cascade_pair();
  g.model_kind = ModelKind::GIM;
  g.continuation.clear();
  g.externality[0][1] = 1.5;
  EXPECT_TRUE(mentions(validate_setting(g), "normalization"));
}

TEST(Validate, CascadeProductChecked) {
  GimSetting g = fixture::cascade_pair();
  g.externality[0][1] = 0.7;
  EXPECT_TRUE(mentions(validate_setting(g), "cascade product"));
}

TEST(Validate, ClickMonotonicity) {
  AuctionSetting s = fixture::eos_pair();
  s.clicks = {{0.25, 0.5}, {0.25, 0.5}};
  EXPECT_TRUE(mentions(validate_setting(s), "click monotonicity"));
}

TEST(Json, RoundTripIsExact) {
  for (const auto& f : all_families()) {
    const auto s = normalize_setting(sample_setting(seeded(f, 9), 3, 3), 30);
    const auto text = to_json(s).dump();
    const auto back = setting_from_json(parse_json_text(text));
    EXPECT_EQ(to_json(back).dump(), text) << f;
    EXPECT_TRUE(back == s) << f;
  }
}

TEST(Json, RejectsBadSubsetKey) {
  auto j = to_json(Setting(fixture::cascade_pair()));
  j["f"][0]["1"] = 0.3;  // subset containing the agent itself
  EXPECT_THROW(setting_from_json(j), SettingFormatError);
}

TEST(Json, ParseErrorCarriesOffset) {
  try {
    parse_json_text("{\"n\": 2,, }");
    FAIL() << "expected a parse error";
  } catch (const SettingFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("byte 9"), std::string::npos) << e.what();
  }
}
