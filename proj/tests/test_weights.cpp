#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "gslab/fenchel.hpp"
#include "gslab/weights.hpp"

using namespace gslab;

namespace {
// sup_t (s t - psi(t)) over a dense t grid, psi(t) = c e^{2t}
double brute_h1(double c, double s) {
  double best = -kInf;
  for (int i = 0; i <= 200000; ++i) {
    const double t = i * 5e-5;
    best = std::max(best, s * t - c * std::exp(2.0 * t));
  }
  return best;
}

// sup_y (s y - c (1+y)^2) over y >= 0, dense grid
double brute_phi_star1(double c, double s) {
  double best = -kInf;
  for (int i = 0; i <= 400000; ++i) {
    const double y = i * 5e-4;
    best = std::max(best, s * y - c * (1.0 + y) * (1.0 + y));
  }
  return best;
}
}  // namespace

TEST(PowerFamily, CoefficientsForSquares) {
  const PowerFamily pf(MFamilySpec{});
  for (int nu = 1; nu <= 5; ++nu) EXPECT_NEAR(pf.c(nu), std::pow(4.0, nu - 1), 1e-12);
  EXPECT_NEAR(pf.M(1, Point{3.0}), 9.0 / 4.0, 1e-14);
}

TEST(PowerFamily, HMatchesBruteConjugate) {
  const PowerFamily pf(MFamilySpec{});
  for (int nu : {1, 2}) {
    EXPECT_EQ(pf.h(nu, Point{0.0}), -pf.c(nu));
    for (double s : {0.5, 3.0, 10.0, 25.0}) EXPECT_NEAR(pf.h1(nu, s), brute_h1(pf.c(nu), s), 1e-6);
  }
}

TEST(PowerFamily, PhiStarMatchesBruteConjugate) {
  const PowerFamily pf(MFamilySpec{});
  for (int nu : {1, 3})
    for (double s : {1.0, 40.0, 100.0}) EXPECT_NEAR(pf.phi_star1(nu, s), brute_phi_star1(pf.c(nu), s), 1e-5);
  EXPECT_NEAR(pf.phi(2, Point{1.0}), 16.0, 1e-12);
}

TEST(PowerFamily, SpecValidation) {
  MFamilySpec s;
  s.p = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = MFamilySpec{};
  s.n = 4;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(WeightFamily, IndexRange) {
  const auto fam = WeightFamily::power(MFamilySpec{}, 8);
  EXPECT_NO_THROW(fam.check_index(8));
  EXPECT_THROW(fam.check_index(0), std::out_of_range);
  EXPECT_THROW(WeightFamily::power(MFamilySpec{}, WeightFamily::kClosedFormIndexCap + 1), std::invalid_argument);
}

TEST(WeightFamily, ConditionsHoldForPowerFamily) {
  auto fam = WeightFamily::power(MFamilySpec{}, 8);
  for (int nu = 1; nu <= 3; ++nu) {
    const auto r = check_H_conditions(fam, nu, default_validation_grid(1), 1e-6, 0);
    EXPECT_TRUE(r.all_passed()) << "nu=" << nu;
    EXPECT_EQ(r.conditions.size(), 6u);
  }
}

TEST(WeightFamily, ShiftConstantsForSquares) {
  auto fam = WeightFamily::power(MFamilySpec{}, 8);
  ensure_constants(fam, 2);
  ASSERT_TRUE(fam.has_constants(1));
  const auto& k = fam.constants(1);
  EXPECT_GE(k.gamma, 0.0);
  EXPECT_LE(k.gamma, 1e-9);
  EXPECT_NEAR(shift_b(fam, 1, 0.0), -3.0, 1e-9);
  EXPECT_NEAR(shift_b(fam, 1, 1.0), -3.0, 1e-9);
}

TEST(WeightFamily, PhiFromHAgreesWithClosedForm) {
  const auto fam = WeightFamily::power(MFamilySpec{}, 4);
  const Evaluator phi = phi_from_h(fam, 2);
  for (double y : {0.0, 0.5, 2.0, 6.0}) EXPECT_NEAR(phi(Point{y}), fam.phi(2, Point{y}), 1e-3 * (1.0 + fam.phi(2, Point{y})));
}

TEST(WeightFamily, BuildTraceAndTableRoundTrip) {
  const auto built = build_family_from_M(MFamilySpec{}, 3);
  ASSERT_EQ(built.build_trace().size(), 3u);
  const auto dir = std::filesystem::temp_directory_path() / "gslab_table_test";
  std::filesystem::create_directories(dir);
  for (const auto& e : built.build_trace()) {
    EXPECT_LE(e.max_rel_dev, 1e-3);
    EXPECT_LE(e.j4_max_slack, 1e-12);
    e.h_grid.write_csv((dir / ("h_" + std::to_string(e.nu) + ".csv")).string());
  }
  const auto tab = WeightFamily::from_table_dir(dir.string());
  for (double x : {0.0, 1.0, 7.5, 20.0})
    EXPECT_NEAR(tab.h(1, Point{x}), built.h(1, Point{x}), 1e-3 * (1.0 + std::fabs(built.h(1, Point{x}))));
  std::filesystem::remove_all(dir);
}
