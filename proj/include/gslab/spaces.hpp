#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gslab/gridcore.hpp"

namespace gslab {

using Complex = std::complex<double>;

// coef * x^p * (D^d G_a)(x), G_a(x) = exp(-a |x|^2)
struct GaussTerm {
  Complex coef;
  MultiIndex p;
  MultiIndex d;
};

struct TestFunctionSpec {
  std::string kind = "gaussian_poly";
  double a = 0.5;
  std::size_t n = 1;
  // coefficient @ exponent; empty means the constant polynomial 1, all-zero
  // coefficients give f = 0
  std::vector<std::pair<double, MultiIndex>> poly;
};

// log|H_k(t)| and sign for k = 0..K, physicists' Hermite polynomials.
std::vector<LogReal> hermite_log(double t, int K);

// Gaussian times polynomial, closed under D and the Fourier transform, so
// every derivative and transform is exact.
class TestFunction {
 public:
  static constexpr int kMaxOrder = 4000;

  TestFunction(double a, std::size_t n, std::vector<GaussTerm> terms);

  double a() const { return a_; }
  std::size_t dim() const { return n_; }
  const std::vector<GaussTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_p() const;
  int max_d() const;

  Complex value(PointView x) const;
  Complex derivative(const MultiIndex& alpha, PointView x) const;
  double log_abs_derivative(const MultiIndex& alpha, PointView x) const;

  // closed-form entire extension at z = x + iy
  Complex entire(PointView x, PointView y) const;
  double log_abs_entire(PointView x, PointView y) const;

  TestFunction differentiate(const MultiIndex& alpha) const;
  // sign +1: kernel e^{+i<x,xi>}; -1: e^{-i<x,xi>}; both scaled by (2 pi)^{-n/2}
  TestFunction fourier_image(int sign = +1) const;
  TestFunction scaled(Complex c) const;

  std::string describe() const;

 private:
  double a_;
  std::size_t n_;
  std::vector<GaussTerm> terms_;
};

TestFunction make_test_function(const TestFunctionSpec& spec);

// log|D^alpha f| on every node of a grid for |alpha_j| <= max_order.
class DerivativeTable {
 public:
  DerivativeTable(const TestFunction& f, const TensorGrid& grid, int max_order);
  double log_abs(const MultiIndex& alpha, std::size_t flat) const;
  const TensorGrid& grid() const { return grid_; }

 private:
  const TestFunction* f_;
  TensorGrid grid_;
  int K_;
  // fac_[t][j][k * N_j + i] = D^k (x^p g^(d)) at node i of axis j
  std::vector<std::vector<std::vector<LogReal>>> fac_;
};

struct SeminormReport {
  std::string which;
  std::string family_ref;
  int nu = 0;
  int m = 0;
  double value = 0.0;
  double log_value = -kInf;
  bool diverging = false;
  bool stabilized = false;
  MultiIndex binding_alpha;
  MultiIndex binding_beta;
  Point binding_x;
  Point binding_y;
  int shells = 0;  // number of shells swept
  int widenings = 0;
  bool boundary_binding = false;
  TensorGrid grid;
  TensorGrid y_grid;
  std::vector<double> shell_max;  // log of the largest term per shell
};

nlohmann::ordered_json to_json(const SeminormReport& r);

struct SweepParams {
  int budget = 400;       // last shell order swept
  int stable_shells = 5;
  double rel_tol = 1e-9;
  int max_widen = 3;
  double widen = 1.5;
};

// [-12,12]^n; 481 points per axis for n = 1, 41 for n = 2, 13 for n = 3
TensorGrid default_space_grid(std::size_t n);

// Weight of the multi-index sweep: beta -> h(beta).
using IndexWeight = std::function<double(PointView)>;

SeminormReport seminorm_G(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                          const SweepParams& sp = {});
SeminormReport seminorm_rho(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                            const SweepParams& sp = {});
// log|F(x + iy)|
using LogAbsComplexEvaluator = std::function<double(PointView, PointView)>;
SeminormReport seminorm_p(const LogAbsComplexEvaluator& F, const Evaluator& phi, int m, const TensorGrid& x_grid,
                          const TensorGrid& y_grid, const SweepParams& sp = {});
SeminormReport seminorm_q(const TestFunction& f, const Evaluator& M, int m, const TensorGrid& grid,
                          const SweepParams& sp = {});

// sup of |D^alpha g(x)| prod (1+|x_k|)^beta_k e^{h(beta)} / beta! for |alpha| <= m, |beta| <= budget
SeminormReport weighted_moment_bound(const TestFunction& f, const IndexWeight& h, int m, const TensorGrid& grid,
                                     int budget = 60);

// log sup |D^alpha f(x)| / (eps^|alpha| alpha!) over the grid, |alpha| <= max_order
double log_derivative_growth(const TestFunction& f, double eps, const TensorGrid& grid, int max_order);

}  // namespace gslab
