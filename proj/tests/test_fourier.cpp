#include <gtest/gtest.h>

#include <cmath>

#include "gslab/fourier.hpp"

using namespace gslab;

namespace {
TestFunction gaussian(double a, std::size_t n = 1, std::vector<std::pair<double, MultiIndex>> poly = {}) {
  TestFunctionSpec s;
  s.a = a;
  s.n = n;
  s.poly = std::move(poly);
  return make_test_function(s);
}

WeightFamily squares(int nu_max = 8) {
  auto fam = WeightFamily::power(MFamilySpec{}, nu_max);
  ensure_constants(fam, 4);
  return fam;
}
}  // namespace

TEST(Fourier, ParamsValidate) {
  FourierParams p;
  p.N = 1000;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.N = 1024;
  p.L = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Fourier, GaussianFixedPoint) {
  const FourierParams p;
  const auto g = gaussian(0.5);
  const auto t = fourier_transform(sample(g, p.spatial_grid()), p);
  EXPECT_LE(max_abs_diff(t.out, sample(g, p.dual_grid())), 1e-8);
  EXPECT_TRUE(t.warnings.empty());
}

TEST(Fourier, FirstMomentAgainstClosedForm) {
  const FourierParams p;
  const auto f = gaussian(0.5, 1, {{1.0, MultiIndex({1})}});
  const auto t = fourier_transform(sample(f, p.spatial_grid()), p);
  EXPECT_LE(max_abs_diff(t.out, sample(f.fourier_image(+1), p.dual_grid())), 1e-8);
}

TEST(Fourier, InverseDirectionUsesConjugateKernel) {
  FourierParams p;
  p.direction = Direction::Inverse;
  const auto f = gaussian(0.5, 1, {{1.0, MultiIndex({1})}});
  const auto t = fourier_transform(sample(f, p.spatial_grid()), p);
  EXPECT_LE(max_abs_diff(t.out, sample(f.fourier_image(-1), p.dual_grid())), 1e-8);
}

TEST(Fourier, RoundTripAndUnitarity) {
  const FourierParams p;
  const auto f = gaussian(1.0, 1, {{1.0, MultiIndex({2})}, {0.5, MultiIndex({0})}});
  const auto s = sample(f, p.spatial_grid());
  const auto t = fourier_transform(s, p);
  const auto back = fourier_transform(t.out, p.dual());
  EXPECT_LE(max_abs_diff(back.out, s), 1e-9);
  EXPECT_LE(std::fabs(l2_norm(t.out) / l2_norm(s) - 1.0), 1e-9);
}

TEST(Fourier, TwoDimensionalGaussian) {
  FourierParams p;
  p.n = 2;
  p.N = 64;
  const auto g = gaussian(0.5, 2);
  const auto t = fourier_transform(sample(g, p.spatial_grid()), p);
  EXPECT_LE(max_abs_diff(t.out, sample(g, p.dual_grid())), 1e-8);
}

TEST(Fourier, EdgeDecay) {
  const FourierParams p;
  EXPECT_THROW(fourier_transform(sample(gaussian(0.01), p.spatial_grid()), p), EdgeDecayError);
  const auto t = fourier_transform(sample(gaussian(0.3), p.spatial_grid()), p);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(Fourier, PipelineRecoversInput) {
  // F^{-1}(A^{-1}(A(F g))) = g on the sampling grid
  const FourierParams p;
  const auto g = gaussian(0.5, 1, {{1.0, MultiIndex({1})}});
  const auto fhat = g.fourier_image(+1);
  const auto restricted = sample(
      [&](PointView x) { return entire_extension(fhat, x, Point(x.size(), 0.0)); }, p.dual_grid());
  const auto back = fourier_transform(restricted, p.dual());
  EXPECT_LE(max_abs_diff(back.out, sample(g, p.spatial_grid())), 1e-8);
}

TEST(EntireExtension, TaylorMatchesClosedForm) {
  const auto f = gaussian(0.5);
  const Complex z(1.0, 2.0);
  EXPECT_NEAR(std::abs(entire_extension(f, Point{1.0}, Point{2.0}) - std::exp(-0.5 * z * z)), 0.0, 1e-10);
  EXPECT_NEAR(entire_extension(f, Point{0.0}, Point{1.0}).real(), std::exp(0.5), 1e-12);
  EXPECT_EQ(entire_extension(TestFunction(0.5, 1, {}), Point{0.0}, Point{1.0}), Complex(0.0));
}

TEST(PaleyWiener, RatiosFiniteAndStabilized) {
  const auto fam = squares();
  for (double a : {0.5, 1.0})
    for (int m : {0, 1})
      for (const auto& r : verify_paley_wiener(gaussian(a), fam, 1, m)) {
        EXPECT_TRUE(r.finite) << to_string(r.id);
        EXPECT_TRUE(r.passed) << to_string(r.id);
        for (const auto& c : r.components) EXPECT_TRUE(c.stabilized) << to_string(r.id) << " " << c.which;
      }
}

TEST(PaleyWiener, ZeroFunctionTrivial) {
  const auto fam = squares();
  for (const auto& r : verify_paley_wiener(TestFunction(0.5, 1, {}), fam, 1, 0)) {
    EXPECT_TRUE(r.trivially_satisfied);
    EXPECT_TRUE(r.passed);
  }
}

TEST(PaleyWiener, IndexShiftMonotonicity) {
  const auto fam = squares(12);
  const auto f = gaussian(1.0);
  std::vector<double> prev;
  for (int nu = 1; nu <= 3; ++nu) {
    std::vector<double> cur;
    for (const auto& r : verify_paley_wiener(f, fam, nu, 1)) cur.push_back(r.log_ratio);
    for (const auto& r : verify_space_equality(f, fam, nu, 1)) cur.push_back(r.log_ratio);
    for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_LE(cur[i], prev[i] + 1e-9) << "nu=" << nu << " i=" << i;
    prev = cur;
  }
}

TEST(SpaceEquality, ReverseBoundAndPerturbation) {
  const auto fam = squares();
  const auto f = gaussian(1.0);
  const auto reps = verify_space_equality(f, fam, 1, 1, offset_perturbation(fam, 0.5));
  ASSERT_EQ(reps.size(), 4u);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.finite);
    EXPECT_TRUE(r.passed) << to_string(r.id) << " " << r.variant;
    if (r.id == PWId::THM4_REV) {
      EXPECT_GE(*r.slack, -1e-6);
    }
    if (r.variant == "perturbed") {
      double infl = 0.0;
      for (const auto& [k, v] : r.extras) {
        if (k == "inflation_factor") infl = v;
      }
      EXPECT_GT(infl, 0.0);
      EXPECT_LE(infl, std::exp(1.0) * (1.0 + 1e-9));
    }
  }
}

TEST(SpaceEquality, ThetaFartherThanCertifiedIsRejected) {
  const auto fam = squares();
  Perturbation p = offset_perturbation(fam, 0.5);
  p.a = 0.1;
  EXPECT_THROW(verify_space_equality(gaussian(1.0), fam, 1, 0, p), std::invalid_argument);
}
