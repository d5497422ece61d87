#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace gslab {

using Point = std::vector<double>;
using PointView = std::span<const double>;
using Evaluator = std::function<double(PointView)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zeros(std::size_t n);

  std::size_t dim() const { return entries_.size(); }
  int operator[](std::size_t j) const { return entries_[j]; }
  const std::vector<int>& entries() const { return entries_; }
  int order() const;

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex&) const = default;
  // Lexicographic, for use as a map key. Not the entrywise order.
  bool operator<(const MultiIndex& other) const { return entries_ < other.entries_; }

  std::string str() const;

 private:
  std::vector<int> entries_;
};

// Entrywise comparison alpha <= beta.
bool entrywise_le(const MultiIndex& alpha, const MultiIndex& beta);

double log_factorial(int k);
double log_factorial(const MultiIndex& beta);
// ln of binom(beta, alpha) = prod_j binom(beta_j, alpha_j); requires alpha <= beta.
double log_binomial(const MultiIndex& beta, const MultiIndex& alpha);
double binomial(const MultiIndex& beta, const MultiIndex& alpha);
double log_abs_monomial(PointView x, const MultiIndex& beta);

// All alpha with |alpha| = order in dimension n, lexicographically descending
// in the first coordinate.
std::vector<MultiIndex> shell(std::size_t n, int order);
// All alpha with alpha <= beta entrywise.
std::vector<MultiIndex> lower_set(const MultiIndex& beta);

// Signed value stored as (ln|v|, sign).
struct LogReal {
  double log_abs = -kInf;
  int sign = 0;

  static LogReal from(double v);
  double value() const;
  bool is_zero() const { return sign == 0; }
  LogReal operator*(const LogReal& o) const;
};
LogReal log_sum(std::span<const LogReal> terms);

class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<std::vector<double>> axes);

  static TensorGrid uniform(std::size_t n, double lo, double hi, std::size_t count);
  // Dense near 0, sparse near hi: x_k = hi (e^{s k/(count-1)} - 1) / (e^s - 1).
  static TensorGrid geometric(std::size_t n, double hi, std::size_t count, double stretch = 4.0);

  std::size_t dim() const { return axes_.size(); }
  const std::vector<double>& axis(std::size_t j) const { return axes_[j]; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  std::vector<std::size_t> shape() const;
  std::size_t size() const;

  std::vector<std::size_t> unravel(std::size_t flat) const;
  std::size_t ravel(std::span<const std::size_t> idx) const;
  Point point(std::size_t flat) const;
  void point_into(std::size_t flat, Point& out) const;
  bool on_boundary(std::size_t flat) const;

  // Superset grid reaching twice the upper extent of every axis, continuing
  // with the last spacing.
  TensorGrid extended() const;
  // Every axis scaled by factor (symmetric widening about 0).
  TensorGrid scaled(double factor) const;

  bool operator==(const TensorGrid&) const = default;

 private:
  std::vector<std::vector<double>> axes_;
};

enum class ExtendedValuePolicy { PlusInfinityOutside, ClampToBoundary };

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(TensorGrid grid, std::vector<double> values,
               ExtendedValuePolicy policy = ExtendedValuePolicy::PlusInfinityOutside);

  static GridFunction sample(const TensorGrid& grid, const Evaluator& f,
                             ExtendedValuePolicy policy = ExtendedValuePolicy::PlusInfinityOutside);

  const TensorGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t dim() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t flat) const { return values_[flat]; }
  ExtendedValuePolicy policy() const { return policy_; }

  // Multilinear interpolation inside the grid; outside, +inf or the clamped
  // value depending on the policy.
  double evaluate(PointView x) const;
  Evaluator evaluator() const;

  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
  static GridFunction read_csv(std::istream& is,
                               ExtendedValuePolicy policy = ExtendedValuePolicy::PlusInfinityOutside);
  static GridFunction read_csv(const std::string& path,
                               ExtendedValuePolicy policy = ExtendedValuePolicy::PlusInfinityOutside);

 private:
  TensorGrid grid_;
  std::vector<double> values_;
  ExtendedValuePolicy policy_ = ExtendedValuePolicy::PlusInfinityOutside;
};

std::string format_double(double v);

}  // namespace gslab
