#include <gtest/gtest.h>

#include <sstream>

#include "gslab/config.hpp"

using namespace gslab;

TEST(KeyValueConfig, ParsesCommentsAndOverrides) {
  std::istringstream in("# header\nnu = 2\nfamily=power:p=2,n=1\n\nnu=3  # later wins\n");
  const auto c = KeyValueConfig::parse(in);
  EXPECT_EQ(*c.get("nu"), "3");
  EXPECT_EQ(*c.get("family"), "power:p=2,n=1");
  EXPECT_FALSE(c.get("m").has_value());
}

TEST(KeyValueConfig, RejectsMalformedLine) {
  std::istringstream in("nu 2\n");
  EXPECT_THROW(KeyValueConfig::parse(in), ConfigError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/gslab.cfg"), ConfigError);
}

TEST(Parse, Numbers) {
  EXPECT_EQ(parse_double("2.5", "x"), 2.5);
  EXPECT_EQ(parse_int("-4", "x"), -4);
  EXPECT_THROW(parse_double("2.5x", "x"), ConfigError);
  EXPECT_THROW(parse_int("1.5", "x"), ConfigError);
}

TEST(Parse, Polynomial) {
  const auto p = parse_poly("1@(0);0.5@(2)", 1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].first, 0.5);
  EXPECT_EQ(p[1].second.entries(), std::vector<int>{2});
  EXPECT_EQ(parse_poly("2@(1,0)", 2)[0].second.entries(), (std::vector<int>{1, 0}));
  EXPECT_THROW(parse_poly("1@(1,0)", 1), ConfigError);
  EXPECT_THROW(parse_poly("1(0)", 1), ConfigError);
}

TEST(Parse, Grid) {
  const auto g = parse_grid_spec("x:-2,2,5", 2);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_EQ(g.axis(1).back(), 2.0);
  EXPECT_THROW(parse_grid_spec("x:2,-2,5", 1), ConfigError);
  EXPECT_THROW(parse_grid_spec("-2,2,5", 1), ConfigError);
}

TEST(Parse, FamilySpec) {
  const auto f = parse_family_spec("power:p=3,n=2,nu_max=5");
  EXPECT_EQ(f.kind, "power");
  EXPECT_EQ(f.power.p, 3.0);
  EXPECT_EQ(f.power.n, 2u);
  EXPECT_EQ(f.nu_max, 5);
  EXPECT_THROW(parse_family_spec("power:q=2"), ConfigError);
  EXPECT_THROW(parse_family_spec("power:p=1"), ConfigError);
  EXPECT_THROW(parse_family_spec("table:count=3"), ConfigError);
  EXPECT_THROW(parse_family_spec("spline"), ConfigError);
  EXPECT_THROW(make_family(parse_family_spec("table:dir=/nonexistent")), ConfigError);
}

TEST(Parse, FunctionSpec) {
  KeyValueConfig c;
  c.set("f.kind", "gaussian_poly");
  c.set("f.a", "1");
  c.set("f.poly", "1@(0)");
  const auto s = function_spec_from(c);
  EXPECT_EQ(s.a, 1.0);
  EXPECT_EQ(s.poly.size(), 1u);
  c.set("f.a", "-1");
  EXPECT_THROW(function_spec_from(c), ConfigError);
  c.set("f.a", "1");
  c.set("f.kind", "bump");
  EXPECT_THROW(function_spec_from(c), ConfigError);
}
