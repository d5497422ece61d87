#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gslab/fenchel.hpp"

using namespace gslab;

namespace {
// random convex samples: cumulative sums of sorted random slopes
GridFunction random_convex(std::mt19937_64& rng, std::size_t N) {
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  std::vector<double> slopes(N - 1);
  for (auto& s : slopes) s = U(rng);
  std::sort(slopes.begin(), slopes.end());
  const TensorGrid g = TensorGrid::uniform(1, -2.0, 2.0, N);
  const double h = g.axis(0)[1] - g.axis(0)[0];
  std::vector<double> v(N);
  v[0] = U(rng);
  for (std::size_t i = 1; i < N; ++i) v[i] = v[i - 1] + slopes[i - 1] * h;
  return GridFunction(g, v);
}
}  // namespace

TEST(Conjugate, HalfSquareIsSelfDual) {
  const TensorGrid g = TensorGrid::uniform(1, -6.0, 6.0, 2401);
  const auto f = GridFunction::sample(g, [](PointView y) { return 0.5 * y[0] * y[0]; });
  const std::vector<double> dual{-3.0, -1.2, 0.0, 0.7, 2.9};
  for (auto method : {ConjugateMethod::Fast, ConjugateMethod::Brute}) {
    const auto r = conjugate_1d(f, dual, method);
    for (std::size_t i = 0; i < dual.size(); ++i) {
      const double exact = 0.5 * dual[i] * dual[i];
      EXPECT_LE(r.dual[i], exact + 1e-12);
      EXPECT_LE(exact - r.dual[i], r.grid_error[i] + 1e-12);
      EXPECT_NEAR(r.dual[i], exact, 1e-5);
    }
  }
}

TEST(Conjugate, FastMatchesBruteOnRandomConvex) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_convex(rng, 257);
    const TensorGrid d = auto_dual_grid(f, 301);
    const auto a = conjugate_nd(f, d, ConjugateMethod::Fast);
    const auto b = conjugate_nd(f, d, ConjugateMethod::Brute);
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_NEAR(a.dual[i], b.dual[i], 1e-12);
  }
}

TEST(Conjugate, FactoredMatchesJointIn2D) {
  const TensorGrid g = TensorGrid::uniform(2, -2.0, 2.0, 41);
  const auto f = GridFunction::sample(g, [](PointView y) { return y[0] * y[0] + 0.3 * std::pow(y[1], 4) + y[0] * y[1] * 0.2; });
  const TensorGrid d = TensorGrid::uniform(2, -3.0, 3.0, 25);
  const auto a = conjugate_nd(f, d);
  const auto b = conjugate_nd_joint(f, d);
  for (std::size_t i = 0; i < d.size(); ++i) ASSERT_NEAR(a.dual[i], b.dual[i], 1e-12);
}

TEST(Conjugate, PointwiseMatchesGrid) {
  const TensorGrid g = TensorGrid::uniform(1, -3.0, 3.0, 301);
  const auto f = GridFunction::sample(g, [](PointView y) { return std::cosh(y[0]); });
  const std::vector<double> dual{-1.0, 0.25, 2.0};
  const auto r = conjugate_1d(f, dual, ConjugateMethod::Brute);
  for (std::size_t i = 0; i < dual.size(); ++i) EXPECT_EQ(conjugate_at(f, Point{dual[i]}).value, r.dual[i]);
}

TEST(Conjugate, BoundaryFlagOutsideSlopeRange) {
  const TensorGrid g = TensorGrid::uniform(1, -1.0, 1.0, 101);
  const auto f = GridFunction::sample(g, [](PointView y) { return 0.5 * y[0] * y[0]; });
  const std::vector<double> dual{0.5, 5.0};
  const auto r = conjugate_1d(f, dual);
  EXPECT_FALSE(r.boundary_attained[0]);
  EXPECT_TRUE(r.boundary_attained[1]);
}

TEST(Biconjugate, ConvexInputsRecovered) {
  const TensorGrid g = TensorGrid::uniform(1, -3.0, 3.0, 401);
  const std::vector<Evaluator> corpus{[](PointView y) { return 0.5 * y[0] * y[0]; },
                                      [](PointView y) { return std::pow(y[0], 4); },
                                      [](PointView y) { return std::exp(std::fabs(y[0])); }};
  for (const auto& u : corpus) {
    const auto f = GridFunction::sample(g, u);
    const auto b = biconjugate(f);
    double dev = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) dev = std::max(dev, std::fabs(b[i] - f[i]));
    EXPECT_LE(dev, 5e-3);
  }
}

TEST(Biconjugate, NeverExceedsInput) {
  const TensorGrid g = TensorGrid::uniform(1, -3.0, 3.0, 401);
  const auto f = GridFunction::sample(g, [](PointView y) { return std::sin(3.0 * y[0]) + 0.1 * y[0] * y[0]; });
  const auto b = biconjugate(f);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(b[i], f[i] + 1e-9);
}

TEST(LineGridError, BoundsTheTrueSup) {
  // sup over the continuum of x*y - y^2/2 on [-2,2] is x^2/2 for |x| <= 2
  const TensorGrid g = TensorGrid::uniform(1, -2.0, 2.0, 21);
  const auto f = GridFunction::sample(g, [](PointView y) { return 0.5 * y[0] * y[0]; });
  for (double x : {-1.93, -0.41, 0.05, 1.37}) {
    const auto p = conjugate_at(f, Point{x});
    EXPECT_GE(p.value + p.grid_error, 0.5 * x * x - 1e-14);
  }
}

TEST(LogSubstitution, Composes) {
  const Evaluator u = [](PointView y) { return y[0] * y[0] + 2.0 * y[1]; };
  const Evaluator v = log_substitution(u);
  EXPECT_NEAR(v(Point{0.3, -1.0}), std::exp(0.6) + 2.0 * std::exp(-1.0), 1e-14);
}

TEST(Biconjugate, ConcaveInputGivesHull) {
  const TensorGrid g = TensorGrid::uniform(1, -1.0, 1.0, 201);
  const auto f = GridFunction::sample(g, [](PointView y) { return -std::fabs(y[0]); });
  const auto b = biconjugate(f);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(b[i], -1.0, 1e-12);
}

TEST(Biconjugate, HalfSquareFixedPoint) {
  const TensorGrid g = TensorGrid::uniform(1, -4.0, 4.0, 401);
  const auto f = GridFunction::sample(g, [](PointView y) { return 0.5 * y[0] * y[0]; });
  const auto b = biconjugate(f);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(b[i], f[i], 1e-6);
}
