#include <gtest/gtest.h>

#include <filesystem>

#include "nlsw/config.hpp"
#include "nlsw/io.hpp"

using namespace nlsw;

namespace {

const char* kText = R"(# sample
[model]
kind = saturated_rational
r0 = 1
params = {rho0 = 0.08, nu = 2}

[run]
seed = 17

[diagram]
c_min = 0.1
c_max = 0.30000000000000004
n = 12

[evolve]
initial = mode
distances = true
delta = 1e-3
)";

std::string config_error(const std::string& text) {
  try {
    Config::parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "config");
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, RoundTrip) {
  const Config a = Config::parse(kText);
  const std::string s = a.serialize();
  const Config b = Config::parse(s);
  EXPECT_EQ(a, b);
  EXPECT_EQ(b.serialize(), s);
  EXPECT_EQ(b.num("diagram", "c_max"), 0.30000000000000004);
  EXPECT_EQ(b.num("evolve", "delta"), 1e-3);
  EXPECT_TRUE(b.flag("evolve", "distances"));
}

TEST(Config, CanonicalOrder) {
  const std::string s = Config::parse(kText).serialize();
  EXPECT_LT(s.find("[run]"), s.find("[model]"));
  EXPECT_LT(s.find("[model]"), s.find("[diagram]"));
}

TEST(Config, BuiltinConfigsRoundTrip) {
  int n = 0;
  for (const auto& f : std::filesystem::directory_iterator(NLSW_CONFIGS)) {
    const Config a = load_config(f.path().string());
    EXPECT_EQ(Config::parse(a.serialize()), a) << f.path();
    EXPECT_NO_THROW(Model(a.model_spec())) << f.path();
    EXPECT_TRUE(a.has_section("diagram")) << f.path();
    ++n;
  }
  EXPECT_EQ(n, 10);
}

TEST(Config, UnknownKeyRejectedWithLine) {
  const auto m = config_error("[model]\nkind = polynomial\nkappa = 3\n");
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;
  EXPECT_NE(m.find("kappa"), std::string::npos) << m;
}

TEST(Config, UnknownSectionRejected) {
  const auto m = config_error("[run]\nseed = 1\n[plot]\n");
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;
}

TEST(Config, MalformedValues) {
  EXPECT_NE(config_error("[grid]\nh = 0.1x\n"), "");
  EXPECT_NE(config_error("[model]\ncoeffs = -1, -3\n"), "");
  EXPECT_NE(config_error("[evolve]\ndistances = yes\n"), "");
  EXPECT_NE(config_error("[grid]\nh = 1\nh = 2\n"), "");
  EXPECT_NE(config_error("h = 1\n"), "");
}

TEST(Config, UnknownModelKind) {
  const Config c = Config::parse("[model]\nkind = cubic\n");
  EXPECT_THROW(c.model_spec(), Error);
}

TEST(Io, SeventeenDigits) {
  Json j;
  j["x"] = 0.1;
  j["n"] = NAN;
  j["k"] = 3;
  EXPECT_EQ(to_json_text(j), "{\n  \"x\": 0.10000000000000001,\n  \"n\": null,\n  \"k\": 3\n}\n");
  Csv c("t", 2, {"a", "b"});
  c.row({1.0, 1.0 / 3});
  EXPECT_EQ(c.text(), "# t v2\na,b\n1,0.33333333333333331\n");
}
