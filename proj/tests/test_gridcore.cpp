#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <sstream>

#include "gslab/gridcore.hpp"

using namespace gslab;
namespace mp = boost::multiprecision;

namespace {
double log_factorial_oracle(int k) {
  mp::cpp_bin_float_50 f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return static_cast<double>(mp::log(f));
}
}  // namespace

TEST(MultiIndex, OrderAndSum) {
  const MultiIndex a({1, 2, 0});
  EXPECT_EQ(a.order(), 3);
  EXPECT_EQ((a + MultiIndex({0, 1, 4})).entries(), (std::vector<int>{1, 3, 4}));
  EXPECT_EQ(MultiIndex::zeros(2).order(), 0);
  EXPECT_THROW(MultiIndex({1, -1}), std::invalid_argument);
}

TEST(MultiIndex, EntrywiseOrder) {
  EXPECT_TRUE(entrywise_le(MultiIndex({1, 2}), MultiIndex({1, 3})));
  EXPECT_FALSE(entrywise_le(MultiIndex({2, 0}), MultiIndex({1, 3})));
}

TEST(Factorial, LargeMultiIndexAgainstMultiprecision) {
  const double want = log_factorial_oracle(170) + log_factorial_oracle(2);
  EXPECT_NEAR(log_factorial(MultiIndex({170, 2})), want, 1e-12 * want);
  EXPECT_NEAR(log_factorial(400), log_factorial_oracle(400), 1e-12 * log_factorial_oracle(400));
  EXPECT_EQ(log_factorial(0), 0.0);
}

TEST(Factorial, Binomial) {
  EXPECT_NEAR(binomial(MultiIndex({4, 2}), MultiIndex({2, 1})), 12.0, 1e-12);
  EXPECT_NEAR(log_binomial(MultiIndex({10}), MultiIndex({3})), std::log(120.0), 1e-12);
}

TEST(Shell, Counts) {
  EXPECT_EQ(shell(1, 5).size(), 1u);
  EXPECT_EQ(shell(2, 3).size(), 4u);
  EXPECT_EQ(shell(3, 2).size(), 6u);
  for (const auto& a : shell(3, 4)) EXPECT_EQ(a.order(), 4);
  EXPECT_EQ(lower_set(MultiIndex({2, 1})).size(), 6u);
}

TEST(LogReal, SignedSum) {
  const LogReal t[] = {LogReal::from(3.0), LogReal::from(-1.0), LogReal::from(0.0)};
  EXPECT_NEAR(log_sum(t).value(), 2.0, 1e-14);
  const LogReal c[] = {LogReal::from(2.5), LogReal::from(-2.5)};
  EXPECT_TRUE(log_sum(c).is_zero());
  EXPECT_NEAR((LogReal::from(-2.0) * LogReal::from(4.0)).value(), -8.0, 1e-14);
}

TEST(TensorGrid, RavelRoundTrip) {
  const TensorGrid g = TensorGrid::uniform(3, -1.0, 1.0, 5);
  EXPECT_EQ(g.size(), 125u);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const auto idx = g.unravel(i);
    EXPECT_EQ(g.ravel(idx), i);
  }
  EXPECT_TRUE(g.on_boundary(0));
  EXPECT_FALSE(g.on_boundary(g.ravel(std::vector<std::size_t>{2, 2, 2})));
}

TEST(TensorGrid, GeometricAndExtended) {
  const TensorGrid g = TensorGrid::geometric(1, 30.0, 301);
  EXPECT_EQ(g.axis(0).front(), 0.0);
  EXPECT_NEAR(g.axis(0).back(), 30.0, 1e-12);
  const TensorGrid e = g.extended();
  EXPECT_GE(e.axis(0).back(), 60.0 - 1e-9);
  EXPECT_NEAR(g.scaled(2.0).axis(0).back(), 60.0, 1e-12);
}

TEST(GridFunction, MultilinearIsExactOnAffine) {
  const TensorGrid g = TensorGrid::uniform(2, 0.0, 1.0, 11);
  const auto f = GridFunction::sample(g, [](PointView x) { return 1.0 + x[0] + 2.0 * x[1]; });
  EXPECT_NEAR(f.evaluate(Point{0.33, 0.71}), 1.0 + 0.33 + 1.42, 1e-13);
  EXPECT_EQ(f.evaluate(Point{1.5, 0.5}), kInf);
  const GridFunction c(g, f.values(), ExtendedValuePolicy::ClampToBoundary);
  EXPECT_NEAR(c.evaluate(Point{1.5, 0.5}), 3.0, 1e-13);
}

TEST(GridFunction, CsvRoundTrip) {
  const TensorGrid g = TensorGrid::uniform(2, -1.0, 2.0, 4);
  const auto f = GridFunction::sample(g, [](PointView x) { return std::exp(x[0]) - x[1] / 3.0; });
  std::stringstream ss;
  f.write_csv(ss);
  const GridFunction r = GridFunction::read_csv(ss);
  EXPECT_EQ(r.grid(), f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(r[i], f[i]);
}

TEST(GridFunction, CsvRejectsRagged) {
  std::stringstream ss("x1,value\n0,1\n1\n");
  EXPECT_ANY_THROW(GridFunction::read_csv(ss));
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
}
