#include <gtest/gtest.h>

#include <cmath>

#include "gslab/lemmalab.hpp"

using namespace gslab;

namespace {
WeightFamily squares() {
  auto fam = WeightFamily::power(MFamilySpec{}, 8);
  ensure_constants(fam, 3);
  return fam;
}
}  // namespace

TEST(Statements, ParseRoundTrip) {
  for (const char* s : {"L1", "L4", "L7", "C2", "TA"}) EXPECT_EQ(to_string(parse_statement(s)), s);
  EXPECT_THROW(parse_statement("L9"), std::invalid_argument);
}

TEST(Lemmas, AllHoldAtFirstIndex) {
  const auto fam = squares();
  for (auto id : {StatementId::L1, StatementId::L2, StatementId::L3, StatementId::L4, StatementId::L5,
                  StatementId::L6, StatementId::L7, StatementId::C1, StatementId::C2, StatementId::C3}) {
    const auto r = verify_inequality(id, fam, 1, LemmaParams{}, default_tolerance(id));
    EXPECT_TRUE(r.passed) << to_string(id) << " slack " << r.min_slack;
    EXPECT_EQ(r.family, fam.label());
  }
}

TEST(Lemmas, ReportJsonCarriesSlack) {
  const auto fam = squares();
  const auto r = verify_inequality(StatementId::L7, fam, 1, LemmaParams{}, 1e-6);
  const auto j = to_json(r);
  EXPECT_EQ(j["statement_id"], "L7");
  EXPECT_DOUBLE_EQ(j["min_slack"].get<double>(), r.min_slack);
}

TEST(Lemmas, L6IsDeterministicForFixedSeed) {
  const auto fam = squares();
  const auto a = verify_inequality(StatementId::L6, fam, 2, LemmaParams{}, 1e-12);
  const auto b = verify_inequality(StatementId::L6, fam, 2, LemmaParams{}, 1e-12);
  EXPECT_EQ(a.min_slack, b.min_slack);
}

TEST(ConjugateSumIdentity, HoldsInOneDimension) {
  for (const char* u : {"power2", "power4", "cosh"}) {
    const auto r = verify_theorem_A(named_u(u), 1, TheoremAParams{}, 2e-3);
    EXPECT_TRUE(r.passed) << u << " " << r.min_slack;
  }
}

TEST(ConjugateSumIdentity, RejectsUnknownU) { EXPECT_THROW(named_u("sin"), std::invalid_argument); }

TEST(Composition, ConvexCompositionPasses) {
  const Evaluator f = [](PointView s) { return s[0] * s[0] + s[1]; };
  const std::vector<Evaluator> g{[](PointView x) { return std::fabs(x[0]); }, [](PointView x) { return x[0] * x[0]; }};
  const auto r = check_convex_composition(f, g, TensorGrid::uniform(1, -3.0, 3.0, 121), 1e-12, 1);
  EXPECT_TRUE(r.passed);
}

TEST(Composition, NonConvexInnerIsAPrecondition) {
  const Evaluator f = [](PointView s) { return s[0]; };
  const std::vector<Evaluator> g{[](PointView x) { return 2.0 + std::sin(x[0]); }};
  EXPECT_THROW(check_convex_composition(f, g, TensorGrid::uniform(1, -3.0, 3.0, 121), 1e-12), PreconditionError);
}
