#include <gtest/gtest.h>

#include "betadd/serialize.hpp"
#include "support.hpp"

using namespace betadd;
using betadd::testing::G;
using betadd::testing::golden_system;

TEST(Serialize, ScalarRoundTrip) {
  for (const QuadExt& x : {G(), QuadExt(0), QuadExt(Rational(-7, 3)), QuadExt::make(Rational(1, 9), -2, 7)}) {
    const json j = scalar_json(x);
    EXPECT_EQ(quad_from_json(j), x);
    EXPECT_EQ(j["decimal"].get<std::string>(), x.to_decimal(kDecimalDigits));
  }
  const json g = scalar_json(G());
  EXPECT_EQ(g["p_num"], "1");
  EXPECT_EQ(g["p_den"], "2");
  EXPECT_EQ(g["d"], 5);
}

TEST(Serialize, MalformedScalar) {
  EXPECT_THROW(quad_from_json(json{{"p_num", "1"}}), Error);
  EXPECT_THROW(quad_from_json(json{{"p_num", "x"}, {"p_den", "1"}, {"q_num", "0"}, {"q_den", "1"}, {"d", 0}}), Error);
}

TEST(Serialize, SystemDescriptor) {
  const json j = system_json(golden_system());
  EXPECT_EQ(j["support_case"], "MainCase");
  EXPECT_EQ(quad_from_json(j["s"]), QuadExt(3));
  EXPECT_EQ(j["digits"].size(), 3u);
  EXPECT_EQ(j["backend"], "exact");
}

TEST(Serialize, OrbitCsv) {
  const auto sys = golden_system();
  const auto o = orbit(sys, QuadExt(1));
  const std::string csv = orbit_csv(sys, o, 4);
  EXPECT_EQ(csv.rfind("step,value,digit\n", 0), 0u);
  EXPECT_NE(csv.find("\n0,1.0000,"), std::string::npos);
  const json j = orbit_json(sys, o);
  EXPECT_EQ(j["period"], 6);
  EXPECT_EQ(j["preperiod"], 0);
}

TEST(Serialize, StepFnJson) {
  const auto h = normalize(phi_closed(golden_system()).phi);
  const json j = step_fn_json(h);
  EXPECT_TRUE(j["normalized"].get<bool>());
  EXPECT_EQ(j["values"].size(), h.pieces());
  EXPECT_EQ(j["breakpoints"].size(), h.pieces() + 1);
  EXPECT_EQ(step_fn_csv(h).rfind("left,right,value\n", 0), 0u);
}

TEST(Serialize, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
