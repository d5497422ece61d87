#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gslab/spaces.hpp"
#include "gslab/weights.hpp"

namespace gslab {

enum class Direction { Forward, Inverse };  // kernel e^{+i<x,xi>} / e^{-i<x,xi>}

struct FourierParams {
  std::size_t n = 1;
  double L = 8.0;       // window [-L, L) per axis
  std::size_t N = 1024;  // samples per axis, power of two
  Direction direction = Direction::Forward;

  void validate() const;
  double step() const { return 2.0 * L / static_cast<double>(N); }
  // x_j = -L + j * step
  TensorGrid spatial_grid() const;
  // xi_k = (k - N/2) pi / L
  TensorGrid dual_grid() const;
  // parameters of the transform that maps the dual grid back
  FourierParams dual() const;
};

struct ComplexSamples {
  TensorGrid grid;
  std::vector<Complex> values;

  // header x1..xn,re,im
  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
};

ComplexSamples sample(const std::function<Complex(PointView)>& f, const TensorGrid& grid);
ComplexSamples sample(const TestFunction& f, const TensorGrid& grid);

class EdgeDecayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransformResult {
  ComplexSamples out;
  double edge_max = 0.0;  // largest |f| on the window boundary
  std::vector<std::string> warnings;
};

// Edge values above warn_level are reported, above fail_level rejected.
TransformResult fourier_transform(const ComplexSamples& in, const FourierParams& params, double warn_level = 1e-12,
                                  double fail_level = 1e-6);

// (sum |v|^2 prod step_j)^(1/2)
double l2_norm(const ComplexSamples& s);
double max_abs_diff(const ComplexSamples& a, const ComplexSamples& b, double radius = kInf);

// Taylor sum of D^alpha f(x) (iy)^alpha / alpha! in shells of |alpha|.
Complex entire_extension(const TestFunction& f, PointView x, PointView y, double trunc_tol = 1e-15,
                         int budget = 400);

enum class PWId { EQ2, EQ3, PROP_NU6, THM2_NU1, THM4_FWD_NU5, THM4_REV };
std::string to_string(PWId id);

struct PWReport {
  PWId id = PWId::EQ2;
  std::string variant = "base";  // "perturbed" for the theta rerun
  std::string family;
  std::string function;
  int nu = 0;
  int m = 0;
  int shift = 0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  double log_ratio = 0.0;
  std::optional<double> log_bound;  // ratio is compared against e^{log_bound}
  std::optional<double> slack;
  bool finite = false;
  bool trivially_satisfied = false;
  bool passed = false;
  std::vector<SeminormReport> components;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const PWReport& r);

struct PWParams {
  FourierParams fft;
  SweepParams sweep;
  std::optional<TensorGrid> grid;  // x grid of the seminorms, default [-12,12]^n
  double eq3_slack = 1.05;
};

// EQ2, EQ3, PROP_NU6, THM2_NU1. Needs cached shift constants for nu.
std::vector<PWReport> verify_paley_wiener(const TestFunction& f, const WeightFamily& family, int nu, int m,
                                          const PWParams& params = {});

struct Perturbation {
  // theta_k close to phi_k within `a` on the grid
  std::function<Evaluator(int)> theta;
  double a = 0.0;
  std::string label;
};

Perturbation offset_perturbation(const WeightFamily& family, double offset);

// THM4_FWD_NU5 and THM4_REV, repeated with theta when a perturbation is given.
std::vector<PWReport> verify_space_equality(const TestFunction& f, const WeightFamily& family, int nu, int m,
                                            const std::optional<Perturbation>& perturbation = std::nullopt,
                                            const PWParams& params = {});

}  // namespace gslab
