#include <gtest/gtest.h>

#include <random>

#include "elevator/mode_spec.hpp"
#include "support.hpp"

using namespace elevator;

namespace {

const std::set<StructRule> kBoth = {StructRule::Contraction, StructRule::Weakening};

RawModeSpec three(std::set<StructRule> p, std::set<StructRule> gf) {
  RawModeSpec r;
  r.modes = {"C", "P", "GF"};
  r.order = {{"C", "P"}, {"P", "GF"}};
  r.signatures = {{"C", kBoth}, {"P", p}, {"GF", gf}};
  return r;
}

}  // namespace

TEST(ModeSpec, ThreeModeChainIsTransitiveAndReflexive) {
  auto s = ModeSpec::validate(three(kBoth, {}));
  EXPECT_TRUE(s.geq("C", "GF"));
  EXPECT_TRUE(s.geq("P", "P"));
  EXPECT_FALSE(s.geq("GF", "C"));
  EXPECT_TRUE(s.gt("C", "P"));
  EXPECT_FALSE(s.allows("GF", StructRule::Weakening));
  EXPECT_TRUE(s.allows("P", StructRule::Contraction));
}

TEST(ModeSpec, RejectsSignatureThatGrowsDownward) {
  try {
    ModeSpec::validate(three({}, {StructRule::Contraction}));
    FAIL() << "accepted";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.kind(), SpecError::Kind::SignatureViolation);
    EXPECT_EQ(e.code(), codes::kSignatureViolation);
    EXPECT_EQ(e.offending_pair, std::make_pair(Mode("P"), Mode("GF")));
  }
}

TEST(ModeSpec, UnknownModeInOrder) {
  auto r = three(kBoth, {});
  r.order.push_back({"C", "Q"});
  try {
    ModeSpec::validate(r);
    FAIL() << "accepted";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.kind(), SpecError::Kind::UnknownMode);
  }
}

TEST(ModeSpec, MalformedJsonIsConfigError) {
  EXPECT_EQ(test::error_code([] { parse_mode_spec_json("{\"modes\": 3}"); }), codes::kConfig);
  EXPECT_EQ(test::error_code([] { parse_mode_spec_json("not json"); }), codes::kConfig);
}

TEST(ModeSpec, MissingFileIsIoError) {
  EXPECT_EQ(test::error_code([] { load_mode_spec_file(test::kSpecs + "/nope.json"); }), codes::kIo);
}

TEST(ModeSpec, ShippedFilesMatchBuiltins) {
  EXPECT_EQ(load_mode_spec_file(test::kSpecs + "/two_mode.json"), code_program_spec());
  EXPECT_EQ(load_mode_spec_file(test::kSpecs + "/three_mode.json"), code_program_linear_spec());
  EXPECT_EQ(load_mode_spec_file(test::kSpecs + "/linear_two_mode.json"), linear_intuitionistic_spec());
  EXPECT_EQ(load_mode_spec_file(test::kSpecs + "/single_mode.json"), single_mode_spec());
}

TEST(ModeSpec, RawRoundTrip) {
  auto s = code_program_linear_spec();
  EXPECT_EQ(ModeSpec::validate(s.to_raw()), s);
}

TEST(ModeSpec, RecursionDefaults) {
  EXPECT_EQ(code_program_linear_spec().recursion("GF"), RecursionPolicy::General);
  EXPECT_EQ(linear_intuitionistic_spec().recursion("L"), RecursionPolicy::None);
  EXPECT_EQ(linear_intuitionistic_spec().recursion("U"), RecursionPolicy::General);
}

// Random preorders: accepted exactly when every related pair is monotone,
// checked against an independent closure.
TEST(ModeSpec, RandomSpecsAgreeWithClosureOracle) {
  std::mt19937 rng(7);
  const std::vector<std::set<StructRule>> sigs = {
      {}, {StructRule::Contraction}, {StructRule::Weakening}, kBoth};
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + int(rng() % 5);
    RawModeSpec raw;
    for (int i = 0; i < n; ++i) {
      raw.modes.push_back("m" + std::to_string(i));
      raw.signatures[raw.modes.back()] = sigs[rng() % 4];
    }
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) reach[i][i] = true;
    for (int e = int(rng() % (n * 2)); e > 0; --e) {
      int a = int(rng() % n), b = int(rng() % n);
      raw.order.push_back({raw.modes[a], raw.modes[b]});
      reach[a][b] = true;
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    bool monotone = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][j]) {
          const auto& hi = raw.signatures[raw.modes[i]];
          for (auto r : raw.signatures[raw.modes[j]]) monotone = monotone && hi.count(r);
        }
    if (!monotone) {
      EXPECT_EQ(test::error_code([&] { ModeSpec::validate(raw); }), codes::kSignatureViolation);
      continue;
    }
    auto s = ModeSpec::validate(raw);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) EXPECT_EQ(s.geq(raw.modes[i], raw.modes[j]), reach[i][j]);
  }
}

TEST(ModeSpec, QueriesOnUndeclaredModeThrow) {
  auto s = code_program_spec();
  EXPECT_EQ(test::error_code([&] { s.geq("C", "Q"); }), codes::kUnknownMode);
  EXPECT_EQ(test::error_code([&] { s.allows("Q", StructRule::Weakening); }), codes::kUnknownMode);
}
